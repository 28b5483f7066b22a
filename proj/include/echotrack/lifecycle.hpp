#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "echotrack/detection.hpp"
#include "echotrack/eva.hpp"
#include "echotrack/graph.hpp"

namespace echotrack {

struct ActivityFilterConfig {
    int min_contributions = 2;            // authored events required to survive the noise filter
    bool require_adjacent_overlap = true; // keep only members present in a neighboring snapshot
    double match_threshold = 0.1;         // jaccard floor; matches must exceed it

    void validate() const {
        if (min_contributions < 1) throw std::invalid_argument("min_contributions must be >= 1");
        if (!(match_threshold >= 0.0 && match_threshold <= 1.0))
            throw std::invalid_argument("match_threshold must be in [0,1]");
    }
};

/// |A ∩ B| / |A ∪ B| over sorted id vectors; 0 when both are empty.
inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Drops users with fewer than min_contributions authored events from every
/// snapshot, along with their incident edges. Snapshots emptied by the filter
/// stay in place (with a warning) so indices keep their meaning.
inline DynamicNetwork filter_one_time_users(const DynamicNetwork& net,
                                            const std::vector<InteractionEvent>& events,
                                            int min_contributions,
                                            std::vector<std::string>* warnings = nullptr) {
    if (min_contributions < 1) throw std::invalid_argument("min_contributions must be >= 1");
    std::map<std::string, int> authored;
    for (const auto& e : events)
        if (!e.actor.empty()) ++authored[e.actor];

    DynamicNetwork out;
    out.topic = net.topic;
    out.snapshots.reserve(net.snapshots.size());
    for (const auto& g : net.snapshots) {
        std::vector<std::string> kept;
        for (const auto& id : g.node_ids()) {
            auto it = authored.find(id);
            if (it != authored.end() && it->second >= min_contributions) kept.push_back(id);
        }
        std::map<std::string, int> idx;
        for (int i = 0; i < static_cast<int>(kept.size()); ++i) idx[kept[static_cast<std::size_t>(i)]] = i;
        std::vector<std::tuple<int, int, double>> edges;
        for (int u = 0; u < g.node_count(); ++u) {
            auto iu = idx.find(g.node_id(u));
            if (iu == idx.end()) continue;
            for (const auto& [v, w] : g.neighbors(u)) {
                if (v <= u) continue;
                auto iv = idx.find(g.node_id(v));
                if (iv == idx.end()) continue;
                edges.emplace_back(iu->second, iv->second, w);
            }
        }
        if (kept.empty() && g.node_count() > 0 && warnings)
            warnings->push_back("snapshot " + std::to_string(g.snapshot_index) +
                                " emptied by the activity filter");
        AttributedSnapshotGraph filtered(g.snapshot_index, g.window, std::move(kept), edges);
        for (int i = 0; i < filtered.node_count(); ++i) {
            const auto orig = g.index_of(filtered.node_id(i));
            if (orig && g.label(*orig)) filtered.set_label(i, *g.label(*orig));
        }
        out.snapshots.push_back(std::move(filtered));
    }
    return out;
}

/// Member-id sets per community per snapshot, sorted for set arithmetic.
using CommunitySets = std::vector<std::vector<std::vector<std::string>>>;

/// Keeps, for each community at snapshot t, only members present in the node
/// set of snapshot t-1 or t+1 (boundary snapshots use their single neighbor).
/// Idempotent; requires >= 2 snapshots.
inline CommunitySets stabilize_membership(const CommunitySets& communities,
                                          const std::vector<std::vector<std::string>>& node_sets) {
    const std::size_t t_count = communities.size();
    if (t_count != node_sets.size())
        throw std::invalid_argument("stabilize_membership: snapshot count mismatch");
    if (t_count < 2)
        throw std::invalid_argument("stabilize_membership: lifecycle undefined for fewer than 2 snapshots");

    auto in_sorted = [](const std::vector<std::string>& set, const std::string& id) {
        return std::binary_search(set.begin(), set.end(), id);
    };

    CommunitySets out(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        out[t].reserve(communities[t].size());
        for (const auto& members : communities[t]) {
            std::vector<std::string> kept;
            for (const auto& id : members) {
                const bool in_prev = t > 0 && in_sorted(node_sets[t - 1], id);
                const bool in_next = t + 1 < t_count && in_sorted(node_sets[t + 1], id);
                if (in_prev || in_next) kept.push_back(id);
            }
            out[t].push_back(std::move(kept));
        }
    }
    return out;
}

struct CommunityMatch {
    int left = 0;       // community id at snapshot t
    int right = 0;      // community id at snapshot t+1
    double jaccard = 0.0;
};

/// Greedy one-to-one matching between the communities of two adjacent
/// snapshots, in descending jaccard order, discarding pairs <= threshold.
/// Ties break toward the larger combined size, then the smaller id pair.
inline std::vector<CommunityMatch> match_communities(
    const std::vector<std::vector<std::string>>& left,
    const std::vector<std::vector<std::string>>& right, double match_threshold) {
    struct Candidate {
        double j;
        std::size_t combined;
        int l, r;
    };
    std::vector<Candidate> cands;
    for (int l = 0; l < static_cast<int>(left.size()); ++l) {
        for (int r = 0; r < static_cast<int>(right.size()); ++r) {
            const double j = jaccard(left[static_cast<std::size_t>(l)], right[static_cast<std::size_t>(r)]);
            if (j > match_threshold)
                cands.push_back({j, left[static_cast<std::size_t>(l)].size() +
                                        right[static_cast<std::size_t>(r)].size(),
                                 l, r});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.j != b.j) return a.j > b.j;
        if (a.combined != b.combined) return a.combined > b.combined;
        return std::pair(a.l, a.r) < std::pair(b.l, b.r);
    });
    std::vector<char> used_l(left.size(), 0), used_r(right.size(), 0);
    std::vector<CommunityMatch> out;
    for (const auto& c : cands) {
        if (used_l[static_cast<std::size_t>(c.l)] || used_r[static_cast<std::size_t>(c.r)]) continue;
        used_l[static_cast<std::size_t>(c.l)] = 1;
        used_r[static_cast<std::size_t>(c.r)] = 1;
        out.push_back({c.l, c.r, c.j});
    }
    std::sort(out.begin(), out.end(),
              [](const CommunityMatch& a, const CommunityMatch& b) { return a.left < b.left; });
    return out;
}

struct ChainStep {
    int snapshot_index = 0;
    int community_id = 0;
    bool is_ec = false;
};

/// One community's evolution across adjacent snapshots: steps carry the
/// detection-phase EC status, jaccard_series the similarity between
/// consecutive steps (length = steps - 1).
struct LifecycleChain {
    int chain_id = 0;
    std::vector<ChainStep> steps;
    std::vector<double> jaccard_series;
};

/// Assembles maximal paths through the per-pair one-to-one match relation.
/// Every community appears in exactly one chain; unmatched communities form
/// single-step chains. EC status comes from the (unfiltered) assessments.
inline std::vector<LifecycleChain> build_chains(
    const std::vector<std::vector<CommunityMatch>>& matches_per_pair,
    const std::vector<std::vector<CommunityAssessment>>& assessments_per_snapshot) {
    const std::size_t t_count = assessments_per_snapshot.size();
    if (t_count >= 1 && matches_per_pair.size() + 1 != t_count)
        throw std::invalid_argument("build_chains: need matches for every adjacent snapshot pair");

    std::map<std::pair<int, int>, bool> ec_of;
    for (const auto& snapshot : assessments_per_snapshot)
        for (const auto& a : snapshot) ec_of[{a.snapshot_index, a.community_id}] = a.is_ec;

    // successor[t][c] -> (community at t+1, jaccard); has_pred marks chain interiors
    std::vector<std::map<int, std::pair<int, double>>> successor(matches_per_pair.size());
    std::vector<std::set<int>> has_pred(t_count);
    for (std::size_t t = 0; t < matches_per_pair.size(); ++t) {
        for (const auto& m : matches_per_pair[t]) {
            successor[t][m.left] = {m.right, m.jaccard};
            has_pred[t + 1].insert(m.right);
        }
    }

    std::vector<LifecycleChain> chains;
    for (std::size_t t = 0; t < t_count; ++t) {
        for (const auto& a : assessments_per_snapshot[t]) {
            if (has_pred[t].count(a.community_id)) continue;  // interior of some chain
            LifecycleChain chain;
            std::size_t cur_t = t;
            int cur_c = a.community_id;
            while (true) {
                const auto it_ec = ec_of.find({static_cast<int>(cur_t), cur_c});
                chain.steps.push_back({static_cast<int>(cur_t), cur_c,
                                       it_ec != ec_of.end() && it_ec->second});
                if (cur_t >= successor.size()) break;
                const auto it = successor[cur_t].find(cur_c);
                if (it == successor[cur_t].end()) break;
                chain.jaccard_series.push_back(it->second.second);
                cur_c = it->second.first;
                ++cur_t;
            }
            chains.push_back(std::move(chain));
        }
    }
    std::sort(chains.begin(), chains.end(), [](const LifecycleChain& a, const LifecycleChain& b) {
        return std::pair(a.steps.front().snapshot_index, a.steps.front().community_id) <
               std::pair(b.steps.front().snapshot_index, b.steps.front().community_id);
    });
    for (std::size_t i = 0; i < chains.size(); ++i) chains[i].chain_id = static_cast<int>(i);
    return chains;
}

/// Full lifecycle step: activity filter, per-community id sets, membership
/// stabilization, adjacent-pair matching, chain assembly. Partitions and
/// assessments are the detection outputs on the unfiltered network.
inline std::vector<LifecycleChain> track_lifecycles(
    const DynamicNetwork& net, const std::vector<InteractionEvent>& events,
    const std::vector<Partition>& partitions,
    const std::vector<std::vector<CommunityAssessment>>& assessments,
    const ActivityFilterConfig& cfg, std::vector<std::string>* warnings = nullptr) {
    cfg.validate();
    if (net.snapshots.size() < 2)
        throw std::invalid_argument("track_lifecycles: lifecycle undefined for fewer than 2 snapshots");
    if (partitions.size() != net.snapshots.size() || assessments.size() != net.snapshots.size())
        throw std::invalid_argument("track_lifecycles: per-snapshot inputs misaligned");

    const DynamicNetwork filtered =
        filter_one_time_users(net, events, cfg.min_contributions, warnings);

    std::vector<std::vector<std::string>> node_sets;
    node_sets.reserve(filtered.snapshots.size());
    for (const auto& g : filtered.snapshots) node_sets.push_back(g.node_ids());  // already sorted

    CommunitySets sets(net.snapshots.size());
    for (std::size_t t = 0; t < net.snapshots.size(); ++t) {
        const auto& g = net.snapshots[t];
        const auto& keep = node_sets[t];
        for (const auto& members : partitions[t].communities) {
            std::vector<std::string> ids;
            for (int u : members) {
                const auto& id = g.node_id(u);
                if (std::binary_search(keep.begin(), keep.end(), id)) ids.push_back(id);
            }
            std::sort(ids.begin(), ids.end());
            sets[t].push_back(std::move(ids));
        }
    }
    if (cfg.require_adjacent_overlap) sets = stabilize_membership(sets, node_sets);

    std::vector<std::vector<CommunityMatch>> matches;
    matches.reserve(net.snapshots.size() - 1);
    for (std::size_t t = 0; t + 1 < net.snapshots.size(); ++t)
        matches.push_back(match_communities(sets[t], sets[t + 1], cfg.match_threshold));
    return build_chains(matches, assessments);
}

}  // namespace echotrack
