#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "echotrack/pipeline.hpp"

using namespace echotrack;

namespace {

namespace fs = std::filesystem;

fs::path temp_path(const char* tag, const char* ext) {
    static int counter = 0;
    return fs::temp_directory_path() / ("echotrack-pipe-" + std::string(tag) + "-" +
                                        std::to_string(::getpid()) + "-" +
                                        std::to_string(counter++) + ext);
}

struct TempTree {
    fs::path root;
    TempTree() {
        root = temp_path("tree", "");
        fs::create_directories(root);
    }
    ~TempTree() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = root / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }
};

void push(std::vector<InteractionEvent>& events, std::string actor, std::string target,
          std::int64_t ts, std::optional<double> score = std::nullopt,
          std::vector<std::string> keywords = {}, std::string text = {}) {
    InteractionEvent e;
    e.actor = std::move(actor);
    e.target = std::move(target);
    e.timestamp = ts;
    e.prediction_score = score;
    e.keywords = std::move(keywords);
    e.text = std::move(text);
    events.push_back(std::move(e));
}

/// Two persistent triangles (pro and anti) linked by one bridge, repeated in
/// two 100-tick windows; everyone authors at least two events.
std::vector<InteractionEvent> two_camp_events() {
    std::vector<InteractionEvent> events;
    for (std::int64_t w = 0; w < 2; ++w) {
        const std::int64_t base = 100 * w;
        const char* pro[] = {"a", "b", "c"};
        const char* anti[] = {"x", "y", "z"};
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            push(events, pro[i], pro[j], base + 1 + i, 0.9);
            push(events, pro[j], pro[i], base + 4 + i, 0.9);
            push(events, anti[i], anti[j], base + 1 + i, 0.1);
            push(events, anti[j], anti[i], base + 4 + i, 0.1);
        }
        push(events, "a", "x", base + 7, 0.9, {"happy", "stellar"});
        push(events, "x", "a", base + 8, 0.1, {"sad"});
    }
    push(events, "b", "c", 9, 0.9, {}, "A happy day");
    push(events, "lurker", "a", 10);  // single unscored post
    return events;
}

std::string serialize(const std::vector<InteractionEvent>& events) {
    std::ostringstream out;
    write_events_jsonl(out, events);
    return out.str();
}

}  // namespace

TEST_CASE("config text: defaults survive an empty file") {
    const auto cfg = parse_config_text("");
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.window_length == 0);
    CHECK(cfg.leaning.lower == 0.3);
    CHECK(cfg.leaning.upper == 0.7);
    CHECK(cfg.leaning_scope == LeaningScope::global);
    CHECK(cfg.eva.alpha == 0.5);
    CHECK(cfg.eva.seed == 42);
    CHECK(cfg.synth.seed == 42);
    CHECK(cfg.ec.min_size == 20);
    CHECK(cfg.conductance_mode == ConductanceMode::paper);
    CHECK(cfg.threads == 0);
}

TEST_CASE("config text: the generated template parses once window_length is set") {
    std::string text = config_template();
    const auto pos = text.find("window_length =");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("window_length =").size(), "window_length = 77");
    const auto cfg = parse_config_text(text);
    CHECK(cfg.window_length == 77);
    CHECK(cfg.events_path.empty());
    CHECK(cfg.origin == 0);
    CHECK(cfg.leaning.lower == 0.3);
    CHECK(cfg.leaning.upper == 0.7);
    CHECK(cfg.eva.alpha == 0.5);
    CHECK(cfg.eva.max_passes == 16);
    CHECK(cfg.eva.min_gain == 1e-7);
    CHECK(cfg.purity_aggregation == PurityAggregation::size_weighted);
    CHECK(cfg.ec.conductance_max == 0.5);
    CHECK(cfg.ec.purity_min == 0.7);
    CHECK(cfg.ec.min_size == 20);
    CHECK(cfg.lifecycle.min_contributions == 2);
    CHECK(cfg.lifecycle.require_adjacent_overlap);
    CHECK(cfg.lifecycle.match_threshold == 0.1);
    CHECK(cfg.valence_pooling == ValencePooling::pooled);
    REQUIRE(cfg.synth.blocks.size() == 2);
    CHECK(cfg.synth.snapshots == 5);
    CHECK(cfg.synth.blocks[0].size == 100);
    CHECK(cfg.synth.blocks[0].label == Leaning::pro);
    CHECK(cfg.synth.blocks[0].intra_p == 0.3);
    CHECK(cfg.synth.blocks[1].label == Leaning::anti);
    CHECK(cfg.synth.inter_p == 0.01);
    CHECK(cfg.synth.window_length == 1000);
}

TEST_CASE("config text: an unedited template still demands window_length") {
    CHECK_THROWS_WITH(parse_config_text(config_template()),
                      Catch::Matchers::ContainsSubstring("window_length"));
}

TEST_CASE("config text: comments, spacing, and value forms") {
    const auto cfg = parse_config_text(
        "# full-line comment\n"
        "\n"
        "  events  =  /tmp/in.jsonl   # trailing comment\n"
        "window_length=50\n"
        "seed = 7\n"
        "eva_alpha = 0.25\n"
        "conductance_mode = classic\n"
        "leaning_scope = per_window\n"
        "purity_aggregation = unweighted\n"
        "valence_pooling = per_document\n"
        "lifecycle_adjacent_overlap = false\n"
        "synth_blocks = 30:pro:0.5:0.9, 10:neutral:1:1\n");
    CHECK(cfg.events_path == "/tmp/in.jsonl");
    CHECK(cfg.window_length == 50);
    CHECK(cfg.eva.seed == 7);
    CHECK(cfg.synth.seed == 7);
    CHECK(cfg.eva.alpha == 0.25);
    CHECK(cfg.conductance_mode == ConductanceMode::classic);
    CHECK(cfg.leaning_scope == LeaningScope::per_window);
    CHECK(cfg.purity_aggregation == PurityAggregation::unweighted);
    CHECK(cfg.valence_pooling == ValencePooling::per_document);
    CHECK_FALSE(cfg.lifecycle.require_adjacent_overlap);
    REQUIRE(cfg.synth.blocks.size() == 2);
    CHECK(cfg.synth.blocks[0].persistence == 0.9);
    CHECK(cfg.synth.blocks[1].size == 10);
    CHECK(cfg.synth.blocks[1].label == Leaning::neutral);
}

TEST_CASE("config text: hard errors instead of silent fallbacks") {
    CHECK_THROWS_WITH(parse_config_text("not a key value line\n"),
                      Catch::Matchers::ContainsSubstring("expected key = value"));
    CHECK_THROWS_WITH(parse_config_text("mystery_key = 5\n"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
    CHECK_THROWS_WITH(parse_config_text("= 5\n"), Catch::Matchers::ContainsSubstring("empty key"));
    CHECK_THROWS_WITH(parse_config_text("window_length = soon\n"),
                      Catch::Matchers::ContainsSubstring("unparsable"));
    CHECK_THROWS_WITH(parse_config_text("lifecycle_adjacent_overlap = yes\n"),
                      Catch::Matchers::ContainsSubstring("true/false"));
    CHECK_THROWS_WITH(parse_config_text("conductance_mode = fancy\n"),
                      Catch::Matchers::ContainsSubstring("paper or classic"));
    CHECK_THROWS_WITH(parse_config_text("leaning_scope = sometimes\n"),
                      Catch::Matchers::ContainsSubstring("global or per_window"));
    CHECK_THROWS_WITH(parse_config_text("synth_blocks = 30:pro:0.5\n"),
                      Catch::Matchers::ContainsSubstring("size:label:intra_p:persistence"));
    CHECK_THROWS_WITH(parse_config_text("synth_blocks = 30:sideways:0.5:1\n"),
                      Catch::Matchers::ContainsSubstring("anti/neutral/pro"));
    CHECK_THROWS_WITH(parse_config_text("synth_blocks = ,\n"),
                      Catch::Matchers::ContainsSubstring("no entries"));
}

TEST_CASE("run validation catches missing inputs before any work") {
    TempTree tree;
    PipelineConfig cfg;
    cfg.window_length = 100;
    cfg.events_path = tree.root / "missing.jsonl";
    CHECK_THROWS_AS(cfg.validate_for_run(), std::invalid_argument);

    cfg.events_path = tree.file("events.jsonl", "{\"actor\":\"a\",\"target\":\"b\",\"timestamp\":1}\n");
    CHECK_NOTHROW(cfg.validate_for_run());

    cfg.window_length = 0;
    CHECK_THROWS_WITH(cfg.validate_for_run(), Catch::Matchers::ContainsSubstring("window_length"));
    cfg.window_length = 100;

    cfg.sidecar_path = tree.root / "missing.tsv";
    CHECK_THROWS_AS(cfg.validate_for_run(), std::invalid_argument);
    cfg.sidecar_path.clear();

    cfg.lexicon_path = tree.root / "missing-lex.tsv";
    CHECK_THROWS_AS(cfg.validate_for_run(), std::invalid_argument);
    cfg.lexicon_path.clear();

    cfg.output_dir.clear();
    CHECK_THROWS_AS(cfg.validate_for_run(), std::invalid_argument);
    cfg.output_dir = "out";

    cfg.threads = -1;
    CHECK_THROWS_AS(cfg.validate_for_run(), std::invalid_argument);
}

TEST_CASE("pipeline failures name their stage") {
    TempTree tree;
    PipelineConfig cfg;
    cfg.window_length = 100;
    cfg.events_path = tree.root / "missing.jsonl";
    try {
        run_pipeline(cfg);
        FAIL("expected a config-stage error");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "config");
        CHECK(std::string(e.what()).find("stage config:") == 0);
    }

    cfg.events_path = tree.file("empty.jsonl", "");
    try {
        run_pipeline(cfg);
        FAIL("expected a build-stage error");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "build");
    }
}

TEST_CASE("end-to-end run over two persistent camps") {
    TempTree tree;
    std::string text = serialize(two_camp_events());
    text += "{oops\n";  // one malformed line at the end
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", text);
    cfg.lexicon_path = tree.file("lexicon.tsv", "happy\t0.9\nsad\t0.1\nday\t0.5\n");
    cfg.topic = "test";
    cfg.window_length = 100;
    cfg.ec.min_size = 2;  // triangles should qualify
    cfg.output_dir = (tree.root / "out").string();

    const auto result = run_pipeline(cfg);

    CHECK(result.event_count == 30);
    REQUIRE(result.rejects.size() == 1);
    CHECK(result.rejects[0].reason == "not a JSON object");

    REQUIRE(result.raw.snapshots.size() == 2);
    CHECK(result.raw.snapshots[0].node_count() == 7);  // lurker included raw
    CHECK(result.labeled.snapshots[0].node_count() == 6);  // ... but not labeled
    CHECK(result.labeled.snapshots[1].node_count() == 6);
    CHECK(result.raw.topic == "test");

    REQUIRE(result.profiles.count("a") == 1);
    CHECK(result.profiles.at("a").label == Leaning::pro);
    CHECK(result.profiles.at("x").label == Leaning::anti);
    CHECK(result.profiles.count("lurker") == 0);

    bool lurker_note = false, reject_note = false;
    for (const auto& n : result.notes) {
        if (n.find("lurker") != std::string::npos) lurker_note = true;
        if (n.find("malformed event line") != std::string::npos) reject_note = true;
    }
    CHECK(lurker_note);
    CHECK(reject_note);

    REQUIRE(result.partitions.size() == 2);
    for (const auto& p : result.partitions) CHECK(p.community_count() == 2);
    REQUIRE(result.assessments.size() == 2);
    // the text event at t=9 thickens one window-0 triangle edge: that camp's
    // boundary ratio is 4/16, every other one is 4/14
    const auto near = [](double v, double want) { return std::abs(v - want) < 1e-12; };
    for (const auto& snapshot : result.assessments) {
        REQUIRE(snapshot.size() == 2);
        for (const auto& a : snapshot) {
            CHECK(a.size == 3);
            CHECK(a.purity == 1.0);
            CHECK((near(a.conductance, 0.25) || near(a.conductance, 2.0 / 7.0)));
            CHECK(a.is_ec);
        }
    }
    REQUIRE(result.scatter.points.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& point = result.scatter.points[i];
        const auto& assessment = result.assessments[static_cast<std::size_t>(
            point.snapshot_index)][static_cast<std::size_t>(point.community_id)];
        CHECK(point.inv_conductance == 1.0 - assessment.conductance);
        CHECK(point.purity == assessment.purity);
    }

    REQUIRE(result.chains.size() == 2);
    for (const auto& chain : result.chains) {
        REQUIRE(chain.steps.size() == 2);
        CHECK(chain.jaccard_series == std::vector<double>{1.0});
        CHECK(chain.steps[0].is_ec);
    }

    REQUIRE(result.valence.has_value());
    REQUIRE(result.valence->rows.size() == 1);
    const auto& row = result.valence->rows[0];
    CHECK(row.topic_id == "test");
    CHECK(row.ec_member);
    CHECK(row.doc_count == 5);
    CHECK(row.matched_keyword_count == 6);
    REQUIRE(row.mean_valence.has_value());
    // pooled: happy 0.9 x2, sad 0.1 x2, fallback text adds happy 0.9 + day 0.5
    CHECK(*row.mean_valence == Catch::Approx(3.4 / 6.0));
    CHECK(result.keyword_source == "mixed");
}

TEST_CASE("per-window scope lets a user's label drift between windows") {
    TempTree tree;
    std::vector<InteractionEvent> events;
    push(events, "u", "v", 1, 0.9);
    push(events, "u", "v", 2, 0.9);
    push(events, "v", "u", 3, 0.5);
    push(events, "u", "v", 101, 0.1);
    push(events, "u", "v", 102, 0.1);
    push(events, "v", "u", 103, 0.5);
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(events));
    cfg.window_length = 100;
    cfg.leaning_scope = LeaningScope::per_window;

    const auto result = run_pipeline(cfg);
    CHECK(result.profiles.empty());
    REQUIRE(result.window_profiles.size() == 2);
    CHECK(result.window_profiles[0].at("u").label == Leaning::pro);
    CHECK(result.window_profiles[1].at("u").label == Leaning::anti);
    const auto& g0 = result.labeled.snapshots[0];
    const auto& g1 = result.labeled.snapshots[1];
    CHECK(*g0.label(*g0.index_of("u")) == Leaning::pro);
    CHECK(*g1.label(*g1.index_of("u")) == Leaning::anti);
    CHECK(*g0.label(*g0.index_of("v")) == Leaning::neutral);
}

TEST_CASE("sidecar scores override and extend the computed profiles") {
    TempTree tree;
    std::vector<InteractionEvent> events;
    push(events, "u", "v", 1, 0.9);
    push(events, "v", "u", 2, 0.9);
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(events));
    cfg.sidecar_path = tree.file("sidecar.tsv", "u\t0.1\nbroken\nw\t0.5\n");
    cfg.window_length = 100;
    const auto result = run_pipeline(cfg);
    CHECK(result.profiles.at("u").label == Leaning::anti);  // overridden
    CHECK(result.profiles.at("v").label == Leaning::pro);
    CHECK(result.profiles.at("w").label == Leaning::neutral);  // sidecar-only user
    bool sidecar_note = false;
    for (const auto& n : result.notes)
        if (n.find("sidecar line 2") != std::string::npos) sidecar_note = true;
    CHECK(sidecar_note);
}

TEST_CASE("an edge-free labeled snapshot falls back to singleton communities") {
    TempTree tree;
    std::vector<InteractionEvent> events;
    push(events, "a", "b", 1, 0.9);
    push(events, "b", "a", 2, 0.9);
    push(events, "c", "d", 101, 0.9);  // d never scores: the w1 edge dies with it
    push(events, "c", "c", 102, 0.9);  // keep c authoring twice
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(events));
    cfg.window_length = 100;
    const auto result = run_pipeline(cfg);
    REQUIRE(result.labeled.snapshots.size() == 2);
    CHECK(result.labeled.snapshots[1].node_count() == 1);
    CHECK(result.labeled.snapshots[1].edge_count() == 0);
    REQUIRE(result.partitions.size() == 2);
    CHECK(result.partitions[1].community_count() == 1);
    bool singleton_note = false;
    for (const auto& n : result.notes)
        if (n.find("no edges; singleton partition") != std::string::npos) singleton_note = true;
    CHECK(singleton_note);
    REQUIRE(result.assessments[1].size() == 1);
    CHECK(result.assessments[1][0].conductance == 1.0);
    CHECK(result.assessments[1][0].conductance_degenerate);
    CHECK_FALSE(result.assessments[1][0].is_ec);
}

TEST_CASE("single-window runs skip lifecycle with a notice") {
    TempTree tree;
    std::vector<InteractionEvent> events;
    push(events, "a", "b", 1, 0.9);
    push(events, "b", "a", 2, 0.9);
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(events));
    cfg.window_length = 100;
    const auto result = run_pipeline(cfg);
    CHECK(result.chains.empty());
    bool note = false;
    for (const auto& n : result.notes)
        if (n.find("lifecycle skipped") != std::string::npos) note = true;
    CHECK(note);
}

TEST_CASE("without a lexicon the valence stage is skipped with a notice") {
    TempTree tree;
    std::vector<InteractionEvent> events;
    push(events, "a", "b", 1, 0.9, {"happy"});
    push(events, "b", "a", 2, 0.9);
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(events));
    cfg.window_length = 100;
    const auto result = run_pipeline(cfg);
    CHECK_FALSE(result.valence.has_value());
    CHECK(result.keyword_source == "none");
    bool note = false;
    for (const auto& n : result.notes)
        if (n.find("valence skipped") != std::string::npos) note = true;
    CHECK(note);
}

TEST_CASE("two runs of the same config agree exactly") {
    TempTree tree;
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(two_camp_events()));
    cfg.lexicon_path = tree.file("lexicon.tsv", "happy\t0.9\nsad\t0.1\n");
    cfg.window_length = 100;
    cfg.ec.min_size = 2;
    const auto a = run_pipeline(cfg);
    const auto b = run_pipeline(cfg);
    std::ostringstream csv_a, csv_b;
    write_partition_csv(csv_a, a.labeled, a.partitions);
    write_partition_csv(csv_b, b.labeled, b.partitions);
    write_assessments_csv(csv_a, a.assessments);
    write_assessments_csv(csv_b, b.assessments);
    write_stability_csv(csv_a, a.chains);
    write_stability_csv(csv_b, b.chains);
    if (a.valence) write_valence_csv(csv_a, *a.valence);
    if (b.valence) write_valence_csv(csv_b, *b.valence);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("report bundle lands on disk with a parseable manifest") {
    TempTree tree;
    std::string text = serialize(two_camp_events());
    text += "{oops\n";
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", text);
    cfg.lexicon_path = tree.file("lexicon.tsv", "happy\t0.9\nsad\t0.1\n");
    cfg.window_length = 100;
    cfg.ec.min_size = 2;
    cfg.output_dir = (tree.root / "out").string();

    const auto result = run_pipeline(cfg);
    write_reports(cfg, result);

    for (const char* name : {"partition.csv", "assessments.csv", "scatter.csv", "stability.csv",
                             "valence.csv", "rejects.tsv", "manifest.json"})
        CHECK(fs::exists(fs::path(cfg.output_dir) / name));

    std::ifstream in(fs::path(cfg.output_dir) / "manifest.json");
    const auto manifest = nlohmann::json::parse(in);
    CHECK(manifest.at("software").at("name") == "echotrack");
    CHECK(manifest.at("config").at("window_length") == 100);
    CHECK(manifest.at("config").at("seed") == 42);
    CHECK(manifest.at("counts").at("snapshots") == 2);
    CHECK(manifest.at("counts").at("communities") == 4);
    CHECK(manifest.at("counts").at("echo_chambers") == 4);
    CHECK(manifest.at("counts").at("rejected_lines") == 1);
    CHECK(manifest.at("counts").at("chains") == 2);
    CHECK(manifest.at("keyword_source") == "mixed");
    CHECK(manifest.at("notes").is_array());
    const std::string stamp = manifest.at("generated_at_utc").get<std::string>();
    REQUIRE(stamp.size() == 20);
    CHECK(stamp[4] == '-');
    CHECK(stamp[10] == 'T');
    CHECK(stamp[19] == 'Z');
}

TEST_CASE("export failures surface as the export stage and clean up") {
    TempTree tree;
    std::vector<InteractionEvent> events;
    push(events, "a", "b", 1, 0.9);
    push(events, "b", "a", 2, 0.9);
    PipelineConfig cfg;
    cfg.events_path = tree.file("events.jsonl", serialize(events));
    cfg.window_length = 100;
    cfg.output_dir = tree.file("blocker", "i am a file");  // a file where a dir must go
    const auto result = run_pipeline(cfg);
    try {
        write_reports(cfg, result);
        FAIL("expected an export-stage error");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "export");
    }
    CHECK(fs::is_regular_file(cfg.output_dir));  // the blocking file is untouched
}
