#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "echotrack/detail/rng.hpp"
#include "echotrack/graph.hpp"

namespace echotrack {

/// Node-to-community assignment over one snapshot graph. Community ids are
/// dense integers from 0; `communities` holds sorted member node indices and
/// is always consistent with `assignment`.
struct Partition {
    int snapshot_index = 0;
    std::vector<int> assignment;
    std::vector<std::vector<int>> communities;

    int community_count() const { return static_cast<int>(communities.size()); }

    /// Renumbers an arbitrary labeling densely by first appearance in node
    /// order and fills in the member lists.
    static Partition from_assignment(int snapshot_index, const std::vector<int>& raw) {
        Partition p;
        p.snapshot_index = snapshot_index;
        p.assignment.resize(raw.size());
        std::map<int, int> dense;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            auto [it, inserted] = dense.try_emplace(raw[i], static_cast<int>(dense.size()));
            p.assignment[i] = it->second;
            if (inserted) p.communities.emplace_back();
            p.communities[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
        }
        return p;
    }

    void validate_over(const AttributedSnapshotGraph& g) const {
        if (static_cast<int>(assignment.size()) != g.node_count())
            throw std::invalid_argument("partition does not cover exactly the graph's nodes");
        std::vector<char> seen(assignment.size(), 0);
        for (std::size_t c = 0; c < communities.size(); ++c) {
            if (communities[c].empty()) throw std::invalid_argument("empty community in partition");
            for (int u : communities[c]) {
                if (u < 0 || u >= g.node_count() || seen[static_cast<std::size_t>(u)])
                    throw std::invalid_argument("inconsistent community membership");
                seen[static_cast<std::size_t>(u)] = 1;
                if (assignment[static_cast<std::size_t>(u)] != static_cast<int>(c))
                    throw std::invalid_argument("assignment/communities mismatch");
            }
        }
        for (char s : seen)
            if (!s) throw std::invalid_argument("node not assigned to any community");
    }
};

struct EvaConfig {
    double alpha = 0.5;        // weight on purity vs modularity
    std::uint64_t seed = 42;
    int max_passes = 16;
    double min_gain = 1e-7;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
        if (max_passes < 1) throw std::invalid_argument("max_passes must be >= 1");
        if (!(min_gain >= 0.0)) throw std::invalid_argument("min_gain must be >= 0");
    }
};

enum class PurityAggregation { size_weighted, unweighted };

/// Newman modularity of a partition on a weighted graph, computed from
/// per-community aggregates: Q = sum_c [ intra_c/m - (tot_c/2m)^2 ].
/// Equals the ordered-pair expansion with zero diagonal.
inline double modularity(const AttributedSnapshotGraph& g, const Partition& p) {
    p.validate_over(g);
    const double m = g.total_edge_weight();
    if (m <= 0.0) throw std::domain_error("modularity undefined for a zero-edge graph");

    std::vector<double> intra(p.communities.size(), 0.0);
    std::vector<double> tot(p.communities.size(), 0.0);
    for (int u = 0; u < g.node_count(); ++u) {
        const int cu = p.assignment[static_cast<std::size_t>(u)];
        for (const auto& [v, w] : g.neighbors(u)) {
            tot[static_cast<std::size_t>(cu)] += w;
            if (v > u && p.assignment[static_cast<std::size_t>(v)] == cu)
                intra[static_cast<std::size_t>(cu)] += w;
        }
    }
    double q = 0.0;
    for (std::size_t c = 0; c < p.communities.size(); ++c) {
        const double frac = tot[c] / (2.0 * m);
        q += intra[c] / m - frac * frac;
    }
    return q;
}

/// Modal-label fraction for one attribute: (count of the most frequent value) / size.
inline double attribute_purity(const std::vector<int>& value_counts, int community_size) {
    if (community_size <= 0) throw std::domain_error("purity undefined for an empty community");
    int modal = 0;
    for (int c : value_counts) modal = std::max(modal, c);
    return static_cast<double>(modal) / community_size;
}

/// Product of modal fractions over several attributes, one factor per
/// attribute.
inline double multi_attribute_purity(const std::vector<std::vector<int>>& counts_per_attribute,
                                     int community_size) {
    if (counts_per_attribute.empty()) throw std::invalid_argument("no attributes");
    double p = 1.0;
    for (const auto& counts : counts_per_attribute) p *= attribute_purity(counts, community_size);
    return p;
}

/// Purity of one community under the single "leaning" attribute.
inline double community_purity(const AttributedSnapshotGraph& g, const std::vector<int>& members) {
    if (members.empty()) throw std::domain_error("purity undefined for an empty community");
    std::vector<int> counts(kLeaningCount, 0);
    for (int u : members) {
        const auto l = g.label(u);
        if (!l) throw std::invalid_argument("unlabeled node in community");
        ++counts[static_cast<std::size_t>(*l)];
    }
    return attribute_purity(counts, static_cast<int>(members.size()));
}

/// Aggregated purity of a whole partition. The size-weighted mean is the
/// default throughout; the unweighted mean is available for reports.
inline double partition_purity(const AttributedSnapshotGraph& g, const Partition& p,
                               PurityAggregation agg = PurityAggregation::size_weighted) {
    if (p.communities.empty()) throw std::domain_error("partition_purity undefined for an empty partition");
    double acc = 0.0;
    int total = 0;
    for (const auto& members : p.communities) {
        const double pur = community_purity(g, members);
        if (agg == PurityAggregation::size_weighted) {
            acc += pur * static_cast<double>(members.size());
            total += static_cast<int>(members.size());
        } else {
            acc += pur;
        }
    }
    return agg == PurityAggregation::size_weighted ? acc / total
                                                   : acc / static_cast<double>(p.communities.size());
}

/// Combined EVA objective alpha*P + (1-alpha)*Q; the quantity the greedy
/// optimizer climbs.
inline double eva_objective(const AttributedSnapshotGraph& g, const Partition& p, double alpha,
                            PurityAggregation agg = PurityAggregation::size_weighted) {
    return alpha * partition_purity(g, p, agg) + (1.0 - alpha) * modularity(g, p);
}

namespace detail {

// Working graph for one aggregation level. Self-loops hold collapsed intra
// weight (counted once; twice in the degree); label histograms and node
// counts always refer to original nodes.
struct EvaLevel {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> self_loop;
    std::vector<double> deg;
    std::vector<std::vector<int>> hist;
    std::vector<int> node_count;
    double m = 0.0;
};

inline int modal_count(const std::vector<int>& hist) {
    int best = 0;
    for (int c : hist) best = std::max(best, c);
    return best;
}

// One local-moving phase: repeatedly sweep all nodes in seeded-shuffle order,
// moving each to the candidate community with the best combined gain, until a
// full pass makes no move. Returns whether anything moved.
inline bool eva_local_move(const EvaLevel& lvl, std::vector<int>& comm, double alpha,
                           double min_gain, int total_original_nodes, Rng& rng) {
    const double m = lvl.m;
    const double inv_n = 1.0 / static_cast<double>(total_original_nodes);
    const std::size_t label_values = lvl.hist.empty() ? 0 : lvl.hist[0].size();

    std::vector<double> comm_tot(static_cast<std::size_t>(lvl.n), 0.0);
    std::vector<std::vector<int>> comm_hist(static_cast<std::size_t>(lvl.n),
                                            std::vector<int>(label_values, 0));
    for (int u = 0; u < lvl.n; ++u) {
        const auto c = static_cast<std::size_t>(comm[static_cast<std::size_t>(u)]);
        comm_tot[c] += lvl.deg[static_cast<std::size_t>(u)];
        for (std::size_t l = 0; l < label_values; ++l)
            comm_hist[c][l] += lvl.hist[static_cast<std::size_t>(u)][l];
    }

    std::vector<double> w_to(static_cast<std::size_t>(lvl.n), 0.0);
    std::vector<int> touched;
    std::vector<int> order(static_cast<std::size_t>(lvl.n));
    std::iota(order.begin(), order.end(), 0);

    bool moved_any = false;
    bool moved_this_pass = true;
    while (moved_this_pass) {
        moved_this_pass = false;
        rng.shuffle(order);
        for (int u : order) {
            const int a = comm[static_cast<std::size_t>(u)];
            const double k_u = lvl.deg[static_cast<std::size_t>(u)];
            const auto& hist_u = lvl.hist[static_cast<std::size_t>(u)];

            touched.clear();
            for (const auto& [v, w] : lvl.adj[static_cast<std::size_t>(u)]) {
                const int c = comm[static_cast<std::size_t>(v)];
                if (w_to[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
                w_to[static_cast<std::size_t>(c)] += w;
            }

            // Join-score of community c with u removed from wherever it is:
            //   q = w(u,c)/m - tot_c * k_u / (2m^2)
            //   p = (modal(hist_c + hist_u) - modal(hist_c)) / N
            auto join_score = [&](int c) {
                const bool own = (c == a);
                const double tot_c = comm_tot[static_cast<std::size_t>(c)] - (own ? k_u : 0.0);
                const double q = w_to[static_cast<std::size_t>(c)] / m - tot_c * k_u / (2.0 * m * m);
                int modal_without = 0, modal_with = 0;
                const auto& hc = comm_hist[static_cast<std::size_t>(c)];
                for (std::size_t l = 0; l < label_values; ++l) {
                    const int without = hc[l] - (own ? hist_u[l] : 0);
                    modal_without = std::max(modal_without, without);
                    modal_with = std::max(modal_with, without + hist_u[l]);
                }
                const double p = static_cast<double>(modal_with - modal_without) * inv_n;
                return alpha * p + (1.0 - alpha) * q;
            };

            const double z_stay = join_score(a);
            int best = a;
            double best_z = z_stay;
            for (int c : touched) {
                if (c == a) continue;
                const double z = join_score(c);
                if (z > best_z || (z == best_z && c < best)) {
                    best = c;
                    best_z = z;
                }
            }

            if (best != a && best_z - z_stay > min_gain) {
                comm_tot[static_cast<std::size_t>(a)] -= k_u;
                comm_tot[static_cast<std::size_t>(best)] += k_u;
                for (std::size_t l = 0; l < label_values; ++l) {
                    comm_hist[static_cast<std::size_t>(a)][l] -= hist_u[l];
                    comm_hist[static_cast<std::size_t>(best)][l] += hist_u[l];
                }
                comm[static_cast<std::size_t>(u)] = best;
                moved_this_pass = true;
                moved_any = true;
            }

            for (int c : touched) w_to[static_cast<std::size_t>(c)] = 0.0;
        }
    }
    return moved_any;
}

// Collapses communities into super-nodes, carrying label histograms and
// original node counts; m is preserved, so objective values carry over exactly.
inline EvaLevel eva_aggregate(const EvaLevel& lvl, const std::vector<int>& comm,
                              std::vector<int>& dense_of_comm) {
    std::vector<int> used;
    for (int c : comm) used.push_back(c);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    dense_of_comm.assign(static_cast<std::size_t>(lvl.n), -1);
    for (std::size_t i = 0; i < used.size(); ++i)
        dense_of_comm[static_cast<std::size_t>(used[i])] = static_cast<int>(i);

    EvaLevel next;
    next.n = static_cast<int>(used.size());
    next.m = lvl.m;
    const std::size_t label_values = lvl.hist.empty() ? 0 : lvl.hist[0].size();
    next.self_loop.assign(static_cast<std::size_t>(next.n), 0.0);
    next.deg.assign(static_cast<std::size_t>(next.n), 0.0);
    next.hist.assign(static_cast<std::size_t>(next.n), std::vector<int>(label_values, 0));
    next.node_count.assign(static_cast<std::size_t>(next.n), 0);

    std::map<std::pair<int, int>, double> inter;
    for (int u = 0; u < lvl.n; ++u) {
        const int cu = dense_of_comm[static_cast<std::size_t>(comm[static_cast<std::size_t>(u)])];
        next.self_loop[static_cast<std::size_t>(cu)] += lvl.self_loop[static_cast<std::size_t>(u)];
        next.node_count[static_cast<std::size_t>(cu)] += lvl.node_count[static_cast<std::size_t>(u)];
        for (std::size_t l = 0; l < label_values; ++l)
            next.hist[static_cast<std::size_t>(cu)][l] += lvl.hist[static_cast<std::size_t>(u)][l];
        for (const auto& [v, w] : lvl.adj[static_cast<std::size_t>(u)]) {
            if (v <= u) continue;
            const int cv = dense_of_comm[static_cast<std::size_t>(comm[static_cast<std::size_t>(v)])];
            if (cu == cv)
                next.self_loop[static_cast<std::size_t>(cu)] += w;
            else
                inter[std::minmax(cu, cv)] += w;
        }
    }
    next.adj.assign(static_cast<std::size_t>(next.n), {});
    for (const auto& [pair, w] : inter) {
        next.adj[static_cast<std::size_t>(pair.first)].emplace_back(pair.second, w);
        next.adj[static_cast<std::size_t>(pair.second)].emplace_back(pair.first, w);
    }
    for (auto& nbrs : next.adj) std::sort(nbrs.begin(), nbrs.end());
    for (int u = 0; u < next.n; ++u) {
        double d = 2.0 * next.self_loop[static_cast<std::size_t>(u)];
        for (const auto& [v, w] : next.adj[static_cast<std::size_t>(u)]) {
            (void)v;
            d += w;
        }
        next.deg[static_cast<std::size_t>(u)] = d;
    }
    return next;
}

}  // namespace detail

/// Louvain extended to node-attributed graphs: greedy maximization of
/// alpha*P + (1-alpha)*Q by two-phase iteration (local moving in seeded-shuffle
/// order, then aggregation into super-nodes), repeated until no improvement or
/// max_passes levels. Purity gains are computed on the label multisets of
/// original nodes carried through aggregation. Deterministic given
/// (graph, seed); with alpha = 0 this is exactly Louvain modularity
/// optimization. Isolated nodes end up in singleton communities.
inline Partition eva_partition(const AttributedSnapshotGraph& g, const EvaConfig& cfg) {
    cfg.validate();
    if (!g.fully_labeled()) throw std::invalid_argument("eva_partition: graph has unlabeled nodes");
    if (g.total_edge_weight() <= 0.0) throw std::domain_error("eva_partition: zero-edge graph");

    const int n = g.node_count();
    detail::EvaLevel lvl;
    lvl.n = n;
    lvl.m = g.total_edge_weight();
    lvl.adj.resize(static_cast<std::size_t>(n));
    lvl.self_loop.assign(static_cast<std::size_t>(n), 0.0);
    lvl.deg.assign(static_cast<std::size_t>(n), 0.0);
    lvl.hist.assign(static_cast<std::size_t>(n), std::vector<int>(kLeaningCount, 0));
    lvl.node_count.assign(static_cast<std::size_t>(n), 1);
    for (int u = 0; u < n; ++u) {
        lvl.adj[static_cast<std::size_t>(u)] = g.neighbors(u);
        lvl.deg[static_cast<std::size_t>(u)] = g.weighted_degree(u);
        lvl.hist[static_cast<std::size_t>(u)][static_cast<std::size_t>(*g.label(u))] = 1;
    }

    detail::Rng rng(cfg.seed);
    std::vector<int> orig_to_super(static_cast<std::size_t>(n));
    std::iota(orig_to_super.begin(), orig_to_super.end(), 0);
    std::vector<int> comm(static_cast<std::size_t>(n));
    std::iota(comm.begin(), comm.end(), 0);

    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        comm.resize(static_cast<std::size_t>(lvl.n));
        std::iota(comm.begin(), comm.end(), 0);
        const bool moved = detail::eva_local_move(lvl, comm, cfg.alpha, cfg.min_gain, n, rng);
        if (!moved) break;
        const int prev_n = lvl.n;
        std::vector<int> dense_of_comm;
        lvl = detail::eva_aggregate(lvl, comm, dense_of_comm);
        for (auto& s : orig_to_super)
            s = dense_of_comm[static_cast<std::size_t>(comm[static_cast<std::size_t>(s)])];
        if (lvl.n == prev_n) break;  // nothing collapsed; a further level cannot help
    }

    Partition p = Partition::from_assignment(g.snapshot_index, orig_to_super);
    return p;
}

}  // namespace echotrack
