#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "echotrack/detail/rng.hpp"
#include "echotrack/detection.hpp"
#include "echotrack/eva.hpp"
#include "echotrack/graph.hpp"

namespace echotrack {

struct SynthBlock {
    int size = 0;
    Leaning label = Leaning::neutral;
    double intra_p = 0.0;      // edge probability inside the block
    double persistence = 1.0;  // per-step probability a member stays in the block
};

struct SynthConfig {
    int snapshots = 2;
    std::vector<SynthBlock> blocks;
    double inter_p = 0.0;      // edge probability across blocks
    std::uint64_t seed = 42;
    double label_noise = 0.0;  // per-snapshot probability a node shows a non-planted label
    std::int64_t window_length = 1000;  // event timestamps span one window per snapshot

    void validate() const {
        if (snapshots < 2) throw std::invalid_argument("snapshots must be >= 2");
        if (blocks.empty()) throw std::invalid_argument("at least one block required");
        for (const auto& b : blocks) {
            if (b.size < 1) throw std::invalid_argument("block sizes must be >= 1");
            if (!(b.intra_p >= 0.0 && b.intra_p <= 1.0))
                throw std::invalid_argument("intra_p must be in [0,1]");
            if (!(b.persistence >= 0.0 && b.persistence <= 1.0))
                throw std::invalid_argument("persistence must be in [0,1]");
        }
        if (!(inter_p >= 0.0 && inter_p <= 1.0))
            throw std::invalid_argument("inter_p must be in [0,1]");
        if (!(label_noise >= 0.0 && label_noise <= 1.0))
            throw std::invalid_argument("label_noise must be in [0,1]");
        if (window_length <= 0) throw std::invalid_argument("window_length must be positive");
    }
};

/// Planted structure behind a generated network: block membership per
/// snapshot over a fixed node universe, plus what the construction
/// parameters predict the classifier should find.
struct GroundTruth {
    std::vector<std::string> node_ids;        // sorted; shared by every snapshot
    std::vector<std::vector<int>> block_of;   // [snapshot][node] -> block index
    std::vector<Leaning> block_label;         // planted label per block
    std::vector<bool> expected_ec;            // per block, from sizes and edge probabilities
};

namespace detail {

inline std::string synth_node_id(int index, int width) {
    std::string digits = std::to_string(index);
    if (static_cast<int>(digits.size()) < width)
        digits.insert(0, static_cast<std::size_t>(width - static_cast<int>(digits.size())), '0');
    return "u" + digits;
}

/// What the block parameters predict under the default classifier: expected
/// modal-label share, and expected conductance from the expected internal
/// and boundary edge counts.
inline bool synth_expected_ec(const SynthConfig& cfg, std::size_t block) {
    const EcThresholds t{};
    const auto& b = cfg.blocks[block];
    int total = 0;
    for (const auto& blk : cfg.blocks) total += blk.size;
    const double s = b.size;
    const double expected_purity =
        cfg.label_noise <= 2.0 / 3.0 ? 1.0 - cfg.label_noise : cfg.label_noise / 2.0;
    const double e_in = b.intra_p * s * (s - 1.0) / 2.0;
    const double e_out = cfg.inter_p * s * (total - s);
    const double denom = 2.0 * e_in + e_out;
    const double expected_cond = denom > 0.0 ? std::min(1.0, 2.0 * e_out / denom) : 1.0;
    return b.size >= t.min_size && expected_purity >= t.purity_min &&
           expected_cond <= t.conductance_max;
}

}  // namespace detail

/// Draws a dynamic block-model network: each snapshot is an independent edge
/// draw over the current block assignment; between snapshots every node keeps
/// its block with that block's persistence, otherwise moves to a uniformly
/// chosen *different* block (so a block's expected surviving fraction equals
/// its persistence). Displayed labels are the planted block label, replaced
/// by one of the other two leanings with probability label_noise, per
/// snapshot. A snapshot drawn with no edges is redrawn up to 10 times.
inline std::pair<DynamicNetwork, GroundTruth> generate(const SynthConfig& cfg) {
    cfg.validate();
    const int block_count = static_cast<int>(cfg.blocks.size());
    int total = 0;
    for (const auto& b : cfg.blocks) total += b.size;
    const int width = static_cast<int>(std::to_string(total - 1).size());

    GroundTruth truth;
    truth.node_ids.reserve(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) truth.node_ids.push_back(detail::synth_node_id(i, width));
    for (const auto& b : cfg.blocks) truth.block_label.push_back(b.label);
    for (std::size_t b = 0; b < cfg.blocks.size(); ++b)
        truth.expected_ec.push_back(detail::synth_expected_ec(cfg, b));

    std::vector<int> assignment;
    assignment.reserve(static_cast<std::size_t>(total));
    for (int b = 0; b < block_count; ++b)
        assignment.insert(assignment.end(), static_cast<std::size_t>(cfg.blocks[static_cast<std::size_t>(b)].size), b);

    detail::Rng rng(cfg.seed);
    DynamicNetwork net;
    net.topic = "synthetic";

    for (int k = 0; k < cfg.snapshots; ++k) {
        if (k > 0 && block_count > 1) {
            for (int u = 0; u < total; ++u) {
                const int cur = assignment[static_cast<std::size_t>(u)];
                if (rng.bernoulli(cfg.blocks[static_cast<std::size_t>(cur)].persistence)) continue;
                int pick = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(block_count - 1)));
                if (pick >= cur) ++pick;  // uniform over the other blocks
                assignment[static_cast<std::size_t>(u)] = pick;
            }
        }
        truth.block_of.push_back(assignment);

        std::vector<Leaning> labels(static_cast<std::size_t>(total));
        for (int u = 0; u < total; ++u) {
            Leaning planted = cfg.blocks[static_cast<std::size_t>(assignment[static_cast<std::size_t>(u)])].label;
            if (cfg.label_noise > 0.0 && rng.bernoulli(cfg.label_noise)) {
                const int shift = 1 + static_cast<int>(rng.uniform_int(2));
                planted = static_cast<Leaning>((static_cast<int>(planted) + shift) % kLeaningCount);
            }
            labels[static_cast<std::size_t>(u)] = planted;
        }

        std::vector<std::tuple<int, int, double>> edges;
        for (int attempt = 0; attempt < 10; ++attempt) {
            edges.clear();
            for (int u = 0; u < total; ++u) {
                for (int v = u + 1; v < total; ++v) {
                    const double p =
                        assignment[static_cast<std::size_t>(u)] == assignment[static_cast<std::size_t>(v)]
                            ? cfg.blocks[static_cast<std::size_t>(assignment[static_cast<std::size_t>(u)])].intra_p
                            : cfg.inter_p;
                    if (p > 0.0 && rng.bernoulli(p)) edges.emplace_back(u, v, 1.0);
                }
            }
            if (!edges.empty()) break;
        }
        if (edges.empty())
            throw std::runtime_error("synthetic snapshot " + std::to_string(k) +
                                     " drew no edges in 10 attempts; raise intra_p/inter_p");

        const TimeWindow window{cfg.window_length * k, cfg.window_length * (k + 1)};
        AttributedSnapshotGraph g(k, window, truth.node_ids, edges);
        for (int u = 0; u < total; ++u) g.set_label(u, labels[static_cast<std::size_t>(u)]);
        net.snapshots.push_back(std::move(g));
    }
    return {std::move(net), std::move(truth)};
}

/// The planted assignment of one snapshot as a partition (community ids
/// renumbered by first appearance; use GroundTruth::block_of when block
/// identity across snapshots matters).
inline Partition planted_partition(const GroundTruth& truth, int snapshot_index) {
    return Partition::from_assignment(snapshot_index,
                                      truth.block_of.at(static_cast<std::size_t>(snapshot_index)));
}

/// Sorted member ids of one planted block in one snapshot.
inline std::vector<std::string> planted_block_members(const GroundTruth& truth, int snapshot_index,
                                                      int block) {
    std::vector<std::string> out;
    const auto& assignment = truth.block_of.at(static_cast<std::size_t>(snapshot_index));
    for (std::size_t u = 0; u < assignment.size(); ++u)
        if (assignment[u] == block) out.push_back(truth.node_ids[u]);
    return out;  // node_ids are sorted, so out is too
}

/// Serializes the generated network into the interaction-event form the
/// ingestion layer reads: every edge yields one event in each direction, the
/// actor's prediction_score mapping its displayed leaning to 0, 0.5, or 1.
inline std::vector<InteractionEvent> to_events(const DynamicNetwork& net,
                                               const SynthConfig& cfg) {
    auto score_of = [](Leaning l) {
        switch (l) {
            case Leaning::anti: return 0.0;
            case Leaning::neutral: return 0.5;
            default: return 1.0;
        }
    };
    std::vector<InteractionEvent> events;
    for (const auto& g : net.snapshots) {
        const std::int64_t stamp = cfg.window_length * g.snapshot_index;
        for (int u = 0; u < g.node_count(); ++u) {
            for (const auto& [v, w] : g.neighbors(u)) {
                (void)w;
                if (v <= u) continue;
                for (const auto& [actor, target] : {std::pair(u, v), std::pair(v, u)}) {
                    InteractionEvent e;
                    e.actor = g.node_id(actor);
                    e.target = g.node_id(target);
                    e.timestamp = stamp;
                    if (g.label(actor)) e.prediction_score = score_of(*g.label(actor));
                    e.topic_id = net.topic;
                    events.push_back(std::move(e));
                }
            }
        }
    }
    return events;
}

}  // namespace echotrack
