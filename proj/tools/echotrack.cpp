// Command-line frontend: init (write a config template), run (full
// detection + lifecycle pipeline), synth (generate a synthetic event
// stream), inspect (pretty-print one snapshot's communities).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "echotrack/io.hpp"
#include "echotrack/pipeline.hpp"
#include "echotrack/synth.hpp"
#include "echotrack/version.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    int threads = -1;                       // -1 = keep config value
    std::optional<std::uint64_t> seed;      // overrides config
    std::string conductance_mode;           // "", "paper", or "classic"
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_mode) {
    cmd->add_option("--config", opts.config_path, "path to the run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--threads", opts.threads, "worker thread cap (0 = machine cores)");
    cmd->add_option("--seed", opts.seed, "RNG seed, overriding the config value");
    if (with_mode)
        cmd->add_option("--conductance-mode", opts.conductance_mode,
                        "boundary formula: paper or classic")
            ->check(CLI::IsMember({"paper", "classic"}));
}

echotrack::PipelineConfig load_with_overrides(const CommonOpts& opts) {
    echotrack::PipelineConfig cfg = echotrack::load_config(opts.config_path);
    if (opts.threads >= 0) cfg.threads = opts.threads;
    if (opts.seed) {
        cfg.eva.seed = *opts.seed;
        cfg.synth.seed = *opts.seed;
    }
    if (!opts.conductance_mode.empty())
        cfg.conductance_mode = echotrack::detail::parse_conductance_mode(opts.conductance_mode);
    return cfg;
}

int run_command(const CommonOpts& opts) {
    const echotrack::PipelineConfig cfg = load_with_overrides(opts);
    const echotrack::PipelineResult result = echotrack::run_pipeline(cfg);
    echotrack::write_reports(cfg, result);

    std::size_t communities = 0, ecs = 0;
    for (const auto& snapshot : result.assessments) {
        communities += snapshot.size();
        for (const auto& a : snapshot) ecs += a.is_ec ? 1 : 0;
    }
    std::cout << "events:        " << result.event_count << " (" << result.rejects.size()
              << " rejected)\n"
              << "snapshots:     " << result.raw.snapshots.size() << '\n'
              << "communities:   " << communities << '\n'
              << "echo chambers: " << ecs << '\n'
              << "chains:        " << result.chains.size() << '\n'
              << "reports:       " << cfg.output_dir << '\n';
    for (const auto& note : result.notes) std::cout << "note: " << note << '\n';
    return 0;
}

int synth_command(const CommonOpts& opts, const std::string& out_path,
                  const std::string& truth_path) {
    const echotrack::PipelineConfig cfg = load_with_overrides(opts);
    const auto [net, truth] = echotrack::generate(cfg.synth);
    const auto events = echotrack::to_events(net, cfg.synth);
    echotrack::write_events_jsonl(out_path, events);
    if (!truth_path.empty()) {
        echotrack::write_file(truth_path, [&](std::ostream& out) {
            out << "snapshot,user_id,block,block_label\n";
            for (std::size_t t = 0; t < truth.block_of.size(); ++t)
                for (std::size_t u = 0; u < truth.node_ids.size(); ++u) {
                    const int block = truth.block_of[t][u];
                    out << t << ',' << truth.node_ids[u] << ',' << block << ','
                        << echotrack::to_string(truth.block_label[static_cast<std::size_t>(block)])
                        << '\n';
                }
        });
    }
    std::cout << "nodes:     " << truth.node_ids.size() << '\n'
              << "snapshots: " << net.snapshots.size() << '\n'
              << "events:    " << events.size() << '\n'
              << "written:   " << out_path << '\n';
    if (!truth_path.empty()) std::cout << "truth:     " << truth_path << '\n';
    return 0;
}

int inspect_command(const CommonOpts& opts, int snapshot) {
    const echotrack::PipelineConfig cfg = load_with_overrides(opts);
    const echotrack::PipelineResult result = echotrack::run_pipeline(cfg);
    if (snapshot < 0 || snapshot >= static_cast<int>(result.assessments.size())) {
        std::cerr << "echotrack: error: snapshot " << snapshot << " out of range (0.."
                  << (result.assessments.empty() ? 0 : result.assessments.size() - 1) << ")\n";
        return 1;
    }
    const auto& g = result.labeled.snapshots[static_cast<std::size_t>(snapshot)];
    std::cout << "snapshot " << snapshot << ": " << g.node_count() << " nodes, " << g.edge_count()
              << " edges, window [" << g.window.start << ", " << g.window.end << ")\n";
    std::cout << std::left << std::setw(10) << "community" << std::setw(6) << "size"
              << std::setw(10) << "purity" << std::setw(13) << "conductance" << std::setw(6)
              << "ec" << "anti/neutral/pro\n";
    for (const auto& a : result.assessments[static_cast<std::size_t>(snapshot)]) {
        auto count = [&](echotrack::Leaning l) {
            auto it = a.label_histogram.find(l);
            return it == a.label_histogram.end() ? 0 : it->second;
        };
        std::cout << std::left << std::setw(10) << a.community_id << std::setw(6) << a.size
                  << std::setw(10) << echotrack::format_double(a.purity) << std::setw(13)
                  << echotrack::format_double(a.conductance) << std::setw(6)
                  << (a.is_ec ? "yes" : "no") << count(echotrack::Leaning::anti) << '/'
                  << count(echotrack::Leaning::neutral) << '/' << count(echotrack::Leaning::pro)
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"echo chamber detection and lifecycle tracking in dynamic interaction networks"};
    app.set_version_flag("--version", std::string("echotrack ") + ECHOTRACK_VERSION);
    app.require_subcommand(1);

    auto* init = app.add_subcommand("init", "write an annotated config template");
    std::string init_path = "echotrack.conf";
    bool init_force = false;
    init->add_option("path", init_path, "where to write the template");
    init->add_flag("--force", init_force, "overwrite an existing file");

    CommonOpts run_opts;
    auto* run = app.add_subcommand("run", "execute the full pipeline and write reports");
    add_common(run, run_opts, /*with_mode=*/true);

    CommonOpts synth_opts;
    std::string synth_out = "events.jsonl";
    std::string synth_truth;
    auto* synth = app.add_subcommand("synth", "generate a synthetic event stream");
    add_common(synth, synth_opts, /*with_mode=*/false);
    synth->add_option("--out", synth_out, "events output path");
    synth->add_option("--truth", synth_truth, "also write the planted block CSV here");

    CommonOpts inspect_opts;
    int inspect_snapshot = 0;
    auto* inspect = app.add_subcommand("inspect", "print one snapshot's community assessments");
    add_common(inspect, inspect_opts, /*with_mode=*/true);
    inspect->add_option("--snapshot", inspect_snapshot, "snapshot index to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (init->parsed()) {
            if (std::filesystem::exists(init_path) && !init_force) {
                std::cerr << "echotrack: error: " << init_path
                          << " already exists (use --force to overwrite)\n";
                return 1;
            }
            echotrack::write_file(init_path,
                                  [](std::ostream& out) { out << echotrack::config_template(); });
            std::cout << "wrote " << init_path << '\n';
            return 0;
        }
        if (run->parsed()) return run_command(run_opts);
        if (synth->parsed()) return synth_command(synth_opts, synth_out, synth_truth);
        if (inspect->parsed()) return inspect_command(inspect_opts, inspect_snapshot);
    } catch (const echotrack::PipelineError& e) {
        std::cerr << "echotrack: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "echotrack: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
