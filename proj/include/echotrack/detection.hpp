#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "echotrack/eva.hpp"
#include "echotrack/graph.hpp"

namespace echotrack {

/// Conductance formula variant. `paper` keeps the printed factor 2 in the
/// numerator, 2|E_OC| / (2|E_C| + |E_OC|); `classic` is the textbook
/// |E_OC| / (2|E_C| + |E_OC|). Both are clamped to [0,1].
enum class ConductanceMode { paper, classic };

inline const char* to_string(ConductanceMode m) {
    return m == ConductanceMode::paper ? "paper" : "classic";
}

struct ConductanceResult {
    double value = 1.0;
    bool degenerate = false;  // no incident edges, or the raw value exceeded 1
};

/// Boundary-to-volume ratio of a community, over edge weights. E_C is the
/// weight of edges with both endpoints inside, E_OC the weight of edges with
/// exactly one endpoint inside.
inline ConductanceResult conductance(const AttributedSnapshotGraph& g,
                                     const std::vector<int>& community,
                                     ConductanceMode mode = ConductanceMode::paper) {
    if (community.empty()) throw std::domain_error("conductance undefined for an empty community");
    std::vector<char> inside(static_cast<std::size_t>(g.node_count()), 0);
    for (int u : community) {
        if (u < 0 || u >= g.node_count())
            throw std::invalid_argument("community member outside the graph");
        inside[static_cast<std::size_t>(u)] = 1;
    }
    double internal = 0.0, boundary = 0.0;
    for (int u : community) {
        for (const auto& [v, w] : g.neighbors(u)) {
            if (inside[static_cast<std::size_t>(v)]) {
                if (v > u) internal += w;
            } else {
                boundary += w;
            }
        }
    }
    if (internal == 0.0 && boundary == 0.0) return {1.0, true};
    const double numerator = (mode == ConductanceMode::paper) ? 2.0 * boundary : boundary;
    const double raw = numerator / (2.0 * internal + boundary);
    if (raw > 1.0) return {1.0, true};
    return {raw, false};
}

/// EC classification thresholds: conductance <= conductance_max AND
/// purity >= purity_min AND size >= min_size.
struct EcThresholds {
    double conductance_max = 0.5;
    double purity_min = 0.7;
    int min_size = 20;

    void validate() const {
        if (!(conductance_max >= 0.0 && conductance_max <= 1.0))
            throw std::invalid_argument("conductance_max must be in [0,1]");
        if (!(purity_min >= 0.0 && purity_min <= 1.0))
            throw std::invalid_argument("purity_min must be in [0,1]");
        if (min_size < 1) throw std::invalid_argument("min_size must be >= 1");
    }
};

struct CommunityAssessment {
    int snapshot_index = 0;
    int community_id = 0;
    int size = 0;
    double purity = 0.0;
    double conductance = 1.0;
    bool conductance_degenerate = false;
    std::map<Leaning, int> label_histogram;
    bool is_ec = false;
};

/// Scores every community of a partition and flags echo chambers by the
/// threshold conjunction. Output sorted by community id.
inline std::vector<CommunityAssessment> classify(const AttributedSnapshotGraph& g,
                                                 const Partition& p, const EcThresholds& t,
                                                 ConductanceMode mode = ConductanceMode::paper) {
    t.validate();
    p.validate_over(g);
    if (!g.fully_labeled()) throw std::invalid_argument("classify: graph has unlabeled nodes");

    std::vector<CommunityAssessment> out;
    out.reserve(p.communities.size());
    for (int c = 0; c < p.community_count(); ++c) {
        const auto& members = p.communities[static_cast<std::size_t>(c)];
        CommunityAssessment a;
        a.snapshot_index = p.snapshot_index;
        a.community_id = c;
        a.size = static_cast<int>(members.size());
        a.purity = community_purity(g, members);
        const auto cond = conductance(g, members, mode);
        a.conductance = cond.value;
        a.conductance_degenerate = cond.degenerate;
        for (int u : members) ++a.label_histogram[*g.label(u)];
        a.is_ec = a.conductance <= t.conductance_max && a.purity >= t.purity_min &&
                  a.size >= t.min_size;
        out.push_back(std::move(a));
    }
    return out;
}

struct ScatterPoint {
    int snapshot_index = 0;
    int community_id = 0;
    double purity = 0.0;
    double inv_conductance = 0.0;  // 1 - conductance
    int size = 0;
    bool is_ec = false;
};

/// Plot-ready rows for the purity / (1 - conductance) scatter, boundaries
/// attached as metadata.
struct ScatterTable {
    std::vector<ScatterPoint> points;
    double purity_boundary = 0.7;
    double inv_conductance_boundary = 0.5;
};

inline ScatterTable scatter_data(const std::vector<CommunityAssessment>& assessments,
                                 const EcThresholds& t) {
    if (assessments.empty()) throw std::invalid_argument("scatter_data: no assessments");
    ScatterTable table;
    table.purity_boundary = t.purity_min;
    table.inv_conductance_boundary = 1.0 - t.conductance_max;
    table.points.reserve(assessments.size());
    for (const auto& a : assessments)
        table.points.push_back({a.snapshot_index, a.community_id, a.purity, 1.0 - a.conductance,
                                a.size, a.is_ec});
    std::sort(table.points.begin(), table.points.end(), [](const auto& x, const auto& y) {
        return std::pair(x.snapshot_index, x.community_id) < std::pair(y.snapshot_index, y.community_id);
    });
    return table;
}

}  // namespace echotrack
