#pragma once

#include <charconv>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "echotrack/detail/parallel.hpp"
#include "echotrack/detection.hpp"
#include "echotrack/eva.hpp"
#include "echotrack/graph.hpp"
#include "echotrack/io.hpp"
#include "echotrack/leaning.hpp"
#include "echotrack/lifecycle.hpp"
#include "echotrack/synth.hpp"
#include "echotrack/valence.hpp"
#include "echotrack/version.hpp"

namespace echotrack {

/// Whether leaning scores pool a user's posts over the whole corpus (one
/// label per user) or are recomputed inside each snapshot's window.
enum class LeaningScope { global, per_window };

inline std::string to_string(LeaningScope s) {
    return s == LeaningScope::global ? "global" : "per_window";
}

inline std::string to_string(PurityAggregation a) {
    return a == PurityAggregation::size_weighted ? "size_weighted" : "unweighted";
}

/// Everything a run needs, mirroring the flat key=value config file
/// one-to-one (see config_template()).
struct PipelineConfig {
    std::string events_path;
    std::string sidecar_path;   // optional: user_id<TAB>score leaning overrides
    std::string lexicon_path;   // optional: enables the valence stage
    std::string output_dir = "out";
    std::string topic;
    std::int64_t window_length = 0;  // required: no defensible default exists
    std::int64_t origin = 0;
    LeaningThresholds leaning{};
    LeaningScope leaning_scope = LeaningScope::global;
    EvaConfig eva{};
    PurityAggregation purity_aggregation = PurityAggregation::size_weighted;
    EcThresholds ec{};
    ConductanceMode conductance_mode = ConductanceMode::paper;
    ActivityFilterConfig lifecycle{};
    ValencePooling valence_pooling = ValencePooling::pooled;
    int threads = 0;  // 0 = machine cores
    SynthConfig synth{};

    void validate_for_run() const {
        if (events_path.empty()) throw std::invalid_argument("config: events path is required");
        if (!std::filesystem::exists(events_path))
            throw std::invalid_argument("config: events file does not exist: " + events_path);
        if (!sidecar_path.empty() && !std::filesystem::exists(sidecar_path))
            throw std::invalid_argument("config: sidecar file does not exist: " + sidecar_path);
        if (!lexicon_path.empty() && !std::filesystem::exists(lexicon_path))
            throw std::invalid_argument("config: lexicon file does not exist: " + lexicon_path);
        if (window_length <= 0)
            throw std::invalid_argument("config: window_length is required and must be positive");
        if (output_dir.empty()) throw std::invalid_argument("config: output_dir must not be empty");
        if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
        leaning.validate();
        eva.validate();
        ec.validate();
        lifecycle.validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error("config: unparsable value '" + value + "' for key " + key);
    return out;
}

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw std::runtime_error("config: key " + key + " wants true/false, got '" + value + "'");
}

inline ConductanceMode parse_conductance_mode(const std::string& value) {
    if (value == "paper") return ConductanceMode::paper;
    if (value == "classic") return ConductanceMode::classic;
    throw std::runtime_error("config: conductance_mode must be paper or classic, got '" + value + "'");
}

/// `size:label:intra_p:persistence` entries, comma-separated.
inline std::vector<SynthBlock> parse_synth_blocks(const std::string& value) {
    std::vector<SynthBlock> blocks;
    std::stringstream list(value);
    std::string entry;
    while (std::getline(list, entry, ',')) {
        entry = trim(entry);
        if (entry.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream fields(entry);
        std::string field;
        while (std::getline(fields, field, ':')) parts.push_back(trim(field));
        if (parts.size() != 4)
            throw std::runtime_error("config: synth block '" + entry +
                                     "' wants size:label:intra_p:persistence");
        SynthBlock b;
        b.size = parse_number<int>(parts[0], "synth_blocks.size");
        const auto label = leaning_from_string(parts[1]);
        if (!label)
            throw std::runtime_error("config: synth block label must be anti/neutral/pro, got '" +
                                     parts[1] + "'");
        b.label = *label;
        b.intra_p = parse_number<double>(parts[2], "synth_blocks.intra_p");
        b.persistence = parse_number<double>(parts[3], "synth_blocks.persistence");
        blocks.push_back(b);
    }
    if (blocks.empty()) throw std::runtime_error("config: synth_blocks has no entries");
    return blocks;
}

}  // namespace detail

/// Parses the flat key=value config format ('#' starts a comment; blank
/// lines ignored; unknown keys are errors so typos cannot silently fall back
/// to defaults). Empty values for path keys mean "unset".
inline PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig cfg;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    bool seed_set = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");

        if (key == "events") cfg.events_path = value;
        else if (key == "sidecar") cfg.sidecar_path = value;
        else if (key == "lexicon") cfg.lexicon_path = value;
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "topic") cfg.topic = value;
        else if (value.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": key " + key +
                                     " has no value");
        else if (key == "window_length") cfg.window_length = detail::parse_number<std::int64_t>(value, key);
        else if (key == "origin") cfg.origin = detail::parse_number<std::int64_t>(value, key);
        else if (key == "leaning_lower") cfg.leaning.lower = detail::parse_number<double>(value, key);
        else if (key == "leaning_upper") cfg.leaning.upper = detail::parse_number<double>(value, key);
        else if (key == "leaning_scope") {
            if (value == "global") cfg.leaning_scope = LeaningScope::global;
            else if (value == "per_window") cfg.leaning_scope = LeaningScope::per_window;
            else throw std::runtime_error("config: leaning_scope must be global or per_window");
        } else if (key == "seed") {
            cfg.eva.seed = detail::parse_number<std::uint64_t>(value, key);
            cfg.synth.seed = cfg.eva.seed;
            seed_set = true;
        } else if (key == "eva_alpha") cfg.eva.alpha = detail::parse_number<double>(value, key);
        else if (key == "eva_max_passes") cfg.eva.max_passes = detail::parse_number<int>(value, key);
        else if (key == "eva_min_gain") cfg.eva.min_gain = detail::parse_number<double>(value, key);
        else if (key == "purity_aggregation") {
            if (value == "size_weighted") cfg.purity_aggregation = PurityAggregation::size_weighted;
            else if (value == "unweighted") cfg.purity_aggregation = PurityAggregation::unweighted;
            else throw std::runtime_error("config: purity_aggregation must be size_weighted or unweighted");
        } else if (key == "ec_conductance_max") cfg.ec.conductance_max = detail::parse_number<double>(value, key);
        else if (key == "ec_purity_min") cfg.ec.purity_min = detail::parse_number<double>(value, key);
        else if (key == "ec_min_size") cfg.ec.min_size = detail::parse_number<int>(value, key);
        else if (key == "conductance_mode") cfg.conductance_mode = detail::parse_conductance_mode(value);
        else if (key == "lifecycle_min_contributions")
            cfg.lifecycle.min_contributions = detail::parse_number<int>(value, key);
        else if (key == "lifecycle_adjacent_overlap")
            cfg.lifecycle.require_adjacent_overlap = detail::parse_bool(value, key);
        else if (key == "lifecycle_match_threshold")
            cfg.lifecycle.match_threshold = detail::parse_number<double>(value, key);
        else if (key == "valence_pooling") {
            if (value == "pooled") cfg.valence_pooling = ValencePooling::pooled;
            else if (value == "per_document") cfg.valence_pooling = ValencePooling::per_document;
            else throw std::runtime_error("config: valence_pooling must be pooled or per_document");
        } else if (key == "threads") cfg.threads = detail::parse_number<int>(value, key);
        else if (key == "synth_snapshots") cfg.synth.snapshots = detail::parse_number<int>(value, key);
        else if (key == "synth_blocks") cfg.synth.blocks = detail::parse_synth_blocks(value);
        else if (key == "synth_inter_p") cfg.synth.inter_p = detail::parse_number<double>(value, key);
        else if (key == "synth_label_noise") cfg.synth.label_noise = detail::parse_number<double>(value, key);
        else if (key == "synth_window_length")
            cfg.synth.window_length = detail::parse_number<std::int64_t>(value, key);
        else
            throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" +
                                     key + "'");
    }
    if (!seed_set) cfg.synth.seed = cfg.eva.seed;
    return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// The annotated config the `init` subcommand writes: every key with its
/// default, ready to edit.
inline std::string config_template() {
    return R"(# echotrack run configuration (key = value; '#' starts a comment)

# --- inputs -------------------------------------------------------------
events =                        # line-delimited JSON interaction records (required)
sidecar =                       # optional user_id<TAB>score leaning overrides
lexicon =                       # optional word<TAB>valence TSV; enables the valence stage
topic =                         # controversy tag stamped on the network (optional)

# --- outputs ------------------------------------------------------------
output_dir = out                # report bundle directory (created if missing)

# --- snapshot windows ---------------------------------------------------
window_length =                 # window size in timestamp units (required, > 0)
origin = 0                      # timestamp where window 0 starts

# --- leaning ------------------------------------------------------------
leaning_lower = 0.3             # score <= lower  -> anti
leaning_upper = 0.7             # score >= upper  -> pro
leaning_scope = global          # global | per_window

# --- community detection ------------------------------------------------
seed = 42                       # RNG seed (detection + synthetic generation)
eva_alpha = 0.5                 # purity weight; 0 = plain modularity optimization
eva_max_passes = 16             # aggregation levels cap
eva_min_gain = 1e-7             # minimum objective gain to accept a move
purity_aggregation = size_weighted  # size_weighted | unweighted (reporting)

# --- echo chamber thresholds --------------------------------------------
ec_conductance_max = 0.5        # community qualifies at conductance <= this
ec_purity_min = 0.7             # ... and purity >= this
ec_min_size = 20                # ... and at least this many members
conductance_mode = paper        # paper | classic boundary formula

# --- lifecycle tracking -------------------------------------------------
lifecycle_min_contributions = 2 # drop users who authored fewer events
lifecycle_adjacent_overlap = true   # keep members present in a neighboring snapshot
lifecycle_match_threshold = 0.1 # Jaccard floor for matching communities across snapshots

# --- valence ------------------------------------------------------------
valence_pooling = pooled        # pooled | per_document group averaging

# --- execution ----------------------------------------------------------
threads = 0                     # worker cap; 0 = machine cores

# --- synthetic generation (synth subcommand) ----------------------------
synth_snapshots = 5
synth_blocks = 100:pro:0.3:1.0,100:anti:0.3:1.0  # size:label:intra_p:persistence, ...
synth_inter_p = 0.01
synth_label_noise = 0.0
synth_window_length = 1000
)";
}

/// A stage failure with the failing stage's name attached.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& message)
        : std::runtime_error("stage " + stage + ": " + message), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Full in-memory result of one run; report writers serialize from here so a
/// failed run leaves no partial files behind.
struct PipelineResult {
    DynamicNetwork raw;      // straight from the event stream, unlabeled
    DynamicNetwork labeled;  // unscored users dropped, labels attached
    std::map<std::string, LeaningProfile> profiles;  // global scope (empty in per_window mode)
    std::vector<std::map<std::string, LeaningProfile>> window_profiles;  // per_window scope
    std::vector<Partition> partitions;
    std::vector<std::vector<CommunityAssessment>> assessments;
    ScatterTable scatter;
    std::vector<LifecycleChain> chains;
    std::optional<ValenceReport> valence;
    std::vector<RejectedLine> rejects;
    std::vector<std::string> notes;
    std::size_t event_count = 0;
    std::string keyword_source = "none";  // precomputed | fallback | mixed | none
};

namespace detail {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

}  // namespace detail

/// Executes build -> label -> partition -> classify -> lifecycle -> valence
/// on the configured inputs. Pure computation: nothing is written to disk.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
    detail::run_stage("config", [&] { cfg.validate_for_run(); });

    PipelineResult result;
    const std::vector<InteractionEvent> events = detail::run_stage("ingest", [&] {
        auto ev = read_events_jsonl(cfg.events_path, &result.rejects);
        if (!result.rejects.empty())
            result.notes.push_back(std::to_string(result.rejects.size()) +
                                   " malformed event line(s) rejected");
        return ev;
    });
    result.event_count = events.size();

    result.raw = detail::run_stage("build", [&] {
        return build_snapshots(events, cfg.window_length, cfg.origin, &result.notes, cfg.topic);
    });

    detail::run_stage("label", [&] {
        std::map<std::string, double> sidecar;
        if (!cfg.sidecar_path.empty()) {
            std::vector<RejectedLine> bad;
            for (const auto& [user, score] : read_sidecar(cfg.sidecar_path, &bad))
                sidecar[user] = score;  // later lines win
            for (const auto& r : bad)
                result.notes.push_back("sidecar line " + std::to_string(r.line_no) +
                                       " rejected: " + r.reason);
        }
        if (cfg.leaning_scope == LeaningScope::global) {
            result.profiles = compute_leaning(events, cfg.leaning, std::nullopt, &result.notes);
            merge_sidecar(result.profiles, sidecar, cfg.leaning);
            result.labeled = apply_labels(result.raw, result.profiles);
        } else {
            result.labeled.topic = result.raw.topic;
            for (const auto& g : result.raw.snapshots) {
                auto profiles = compute_leaning(events, cfg.leaning, g.window, &result.notes);
                merge_sidecar(profiles, sidecar, cfg.leaning);
                result.labeled.snapshots.push_back(label_snapshot(g, profiles));
                result.window_profiles.push_back(std::move(profiles));
            }
        }
        return 0;
    });

    detail::run_stage("partition", [&] {
        const std::size_t t_count = result.labeled.snapshots.size();
        result.partitions.resize(t_count);
        result.assessments.resize(t_count);
        std::vector<std::string> snapshot_notes(t_count);
        detail::parallel_for(t_count, detail::resolve_threads(cfg.threads), [&](std::size_t t) {
            const auto& g = result.labeled.snapshots[t];
            if (g.total_edge_weight() > 0.0) {
                result.partitions[t] = eva_partition(g, cfg.eva);
            } else {
                std::vector<int> singletons(static_cast<std::size_t>(g.node_count()));
                std::iota(singletons.begin(), singletons.end(), 0);
                result.partitions[t] = Partition::from_assignment(g.snapshot_index, singletons);
                if (g.node_count() > 0)
                    snapshot_notes[t] = "snapshot " + std::to_string(g.snapshot_index) +
                                        " has no edges; singleton partition used";
            }
            result.assessments[t] =
                classify(g, result.partitions[t], cfg.ec, cfg.conductance_mode);
        });
        for (auto& note : snapshot_notes)
            if (!note.empty()) result.notes.push_back(std::move(note));
        return 0;
    });

    detail::run_stage("classify", [&] {
        std::vector<CommunityAssessment> all;
        for (const auto& snapshot : result.assessments)
            all.insert(all.end(), snapshot.begin(), snapshot.end());
        if (!all.empty()) {
            result.scatter = scatter_data(all, cfg.ec);
        } else {
            result.scatter.purity_boundary = cfg.ec.purity_min;
            result.scatter.inv_conductance_boundary = 1.0 - cfg.ec.conductance_max;
            result.notes.push_back("no communities found; scatter report is empty");
        }
        return 0;
    });

    detail::run_stage("lifecycle", [&] {
        if (result.labeled.snapshots.size() < 2) {
            result.notes.push_back("lifecycle skipped: fewer than 2 snapshots");
            return 0;
        }
        result.chains = track_lifecycles(result.labeled, events, result.partitions,
                                         result.assessments, cfg.lifecycle, &result.notes);
        return 0;
    });

    detail::run_stage("valence", [&] {
        if (cfg.lexicon_path.empty()) {
            result.notes.push_back("valence skipped: no lexicon configured");
            return 0;
        }
        std::vector<std::string> lexicon_warnings;
        const ValenceLexicon lexicon = load_lexicon(cfg.lexicon_path, &lexicon_warnings);
        for (auto& w : lexicon_warnings) result.notes.push_back("lexicon: " + std::move(w));

        std::vector<std::map<int, bool>> ec_of(result.assessments.size());
        for (std::size_t t = 0; t < result.assessments.size(); ++t)
            for (const auto& a : result.assessments[t]) ec_of[t][a.community_id] = a.is_ec;

        const std::string default_topic = cfg.topic.empty() ? "default" : cfg.topic;
        std::size_t precomputed = 0, fallback = 0;
        std::vector<ValenceDoc> docs;
        for (const auto& e : events) {
            ValenceDoc doc;
            if (!e.keywords.empty()) {
                doc.keywords = e.keywords;
                ++precomputed;
            } else if (!e.text.empty()) {
                doc.keywords = fallback_keywords(e.text);
                ++fallback;
            } else {
                continue;
            }
            if (result.labeled.snapshots.empty()) continue;
            const auto idx = detail::floor_div(e.timestamp - result.labeled.snapshots.front().window.start,
                                               cfg.window_length);
            if (idx < 0 || idx >= static_cast<std::int64_t>(result.labeled.snapshots.size())) continue;
            const auto t = static_cast<std::size_t>(idx);
            const auto author = result.labeled.snapshots[t].index_of(e.actor);
            if (!author) continue;  // author unassigned in this snapshot
            const int community = result.partitions[t].assignment[static_cast<std::size_t>(*author)];
            doc.ec_member = ec_of[t].at(community);
            doc.topic_id = e.topic_id.empty() ? default_topic : e.topic_id;
            docs.push_back(std::move(doc));
        }
        if (precomputed > 0 && fallback > 0) result.keyword_source = "mixed";
        else if (precomputed > 0) result.keyword_source = "precomputed";
        else if (fallback > 0) result.keyword_source = "fallback";
        if (result.keyword_source == "fallback" || result.keyword_source == "mixed")
            result.notes.push_back("valence keywords partly from the built-in fallback extractor");
        result.valence = group_valence(docs, lexicon, cfg.valence_pooling);
        return 0;
    });

    return result;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Reproducibility record: software version, every config value, and result
/// counts. Key order is fixed (sorted), so two identical runs differ only in
/// generated_at_utc.
inline nlohmann::json build_manifest(const PipelineConfig& cfg, const PipelineResult& result,
                                     const std::string& generated_at) {
    nlohmann::json config;
    config["events"] = cfg.events_path;
    config["sidecar"] = cfg.sidecar_path;
    config["lexicon"] = cfg.lexicon_path;
    config["output_dir"] = cfg.output_dir;
    config["topic"] = cfg.topic;
    config["window_length"] = cfg.window_length;
    config["origin"] = cfg.origin;
    config["leaning_lower"] = cfg.leaning.lower;
    config["leaning_upper"] = cfg.leaning.upper;
    config["leaning_scope"] = to_string(cfg.leaning_scope);
    config["seed"] = cfg.eva.seed;
    config["eva_alpha"] = cfg.eva.alpha;
    config["eva_max_passes"] = cfg.eva.max_passes;
    config["eva_min_gain"] = cfg.eva.min_gain;
    config["purity_aggregation"] = to_string(cfg.purity_aggregation);
    config["ec_conductance_max"] = cfg.ec.conductance_max;
    config["ec_purity_min"] = cfg.ec.purity_min;
    config["ec_min_size"] = cfg.ec.min_size;
    config["conductance_mode"] = to_string(cfg.conductance_mode);
    config["lifecycle_min_contributions"] = cfg.lifecycle.min_contributions;
    config["lifecycle_adjacent_overlap"] = cfg.lifecycle.require_adjacent_overlap;
    config["lifecycle_match_threshold"] = cfg.lifecycle.match_threshold;
    config["valence_pooling"] = to_string(cfg.valence_pooling);
    config["threads"] = cfg.threads;

    nlohmann::json counts;
    counts["events"] = result.event_count;
    counts["rejected_lines"] = result.rejects.size();
    counts["snapshots"] = result.raw.snapshots.size();
    counts["chains"] = result.chains.size();
    std::size_t communities = 0, ecs = 0;
    for (const auto& snapshot : result.assessments) {
        communities += snapshot.size();
        for (const auto& a : snapshot) ecs += a.is_ec ? 1 : 0;
    }
    counts["communities"] = communities;
    counts["echo_chambers"] = ecs;

    nlohmann::json manifest;
    manifest["config"] = std::move(config);
    manifest["counts"] = std::move(counts);
    manifest["generated_at_utc"] = generated_at;
    manifest["keyword_source"] = result.keyword_source;
    manifest["notes"] = result.notes;
    manifest["software"] = {{"name", "echotrack"}, {"version", ECHOTRACK_VERSION}};
    return manifest;
}

/// Writes the report bundle into cfg.output_dir (created if missing):
/// partition.csv, assessments.csv, scatter.csv, stability.csv, valence.csv
/// (when the stage ran), rejects.tsv (when lines were rejected), and
/// manifest.json. On a write failure every file written so far is removed.
inline void write_reports(const PipelineConfig& cfg, const PipelineResult& result) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    try {
        fs::create_directories(cfg.output_dir);
        auto emit = [&](const std::string& name, auto&& fn) {
            const std::string path = (fs::path(cfg.output_dir) / name).string();
            write_file(path, fn);
            written.push_back(path);
        };
        emit("partition.csv",
             [&](std::ostream& out) { write_partition_csv(out, result.labeled, result.partitions); });
        emit("assessments.csv",
             [&](std::ostream& out) { write_assessments_csv(out, result.assessments); });
        emit("scatter.csv", [&](std::ostream& out) { write_scatter_csv(out, result.scatter); });
        emit("stability.csv", [&](std::ostream& out) { write_stability_csv(out, result.chains); });
        if (result.valence)
            emit("valence.csv", [&](std::ostream& out) { write_valence_csv(out, *result.valence); });
        if (!result.rejects.empty()) {
            const std::string path = (fs::path(cfg.output_dir) / "rejects.tsv").string();
            write_rejects(path, result.rejects);
            written.push_back(path);
        }
        emit("manifest.json", [&](std::ostream& out) {
            out << build_manifest(cfg, result, utc_timestamp()).dump(2) << '\n';
        });
    } catch (const std::exception& e) {
        std::error_code ec;
        for (const auto& path : written) fs::remove(path, ec);
        throw PipelineError("export", e.what());
    }
}

}  // namespace echotrack
