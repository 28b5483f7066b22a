#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace echotrack {

/// Discrete stance of a user toward the analyzed controversy.
enum class Leaning : std::uint8_t { anti = 0, neutral = 1, pro = 2 };

inline constexpr int kLeaningCount = 3;

inline const char* to_string(Leaning l) {
    switch (l) {
        case Leaning::anti: return "anti";
        case Leaning::neutral: return "neutral";
        case Leaning::pro: return "pro";
    }
    return "?";
}

inline std::optional<Leaning> leaning_from_string(const std::string& s) {
    if (s == "anti") return Leaning::anti;
    if (s == "neutral") return Leaning::neutral;
    if (s == "pro") return Leaning::pro;
    return std::nullopt;
}

struct NoDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One reply between two users. Empty-string ids mean "missing"; keywords and
/// text are carried for the valence stage only.
struct InteractionEvent {
    std::string actor;
    std::string target;
    std::int64_t timestamp = 0;
    std::optional<double> prediction_score;  // per-post classifier confidence in [0,1]
    std::string doc_id;
    std::string topic_id;
    std::vector<std::string> keywords;
    std::string text;  // optional raw text, fallback source for keywords

    bool is_self_reply() const { return actor == target; }
};

/// Half-open interval [start, end) in event-timestamp units.
struct TimeWindow {
    std::int64_t start = 0;
    std::int64_t end = 0;

    bool contains(std::int64_t t) const { return t >= start && t < end; }
};

/// Weighted undirected graph for one time window. Nodes are user ids held in a
/// sorted vector; algorithms work on the dense indices. No self-loops; the
/// weight of {u,v} is the number of interaction events between u and v inside
/// the window, both directions pooled.
class AttributedSnapshotGraph {
public:
    int snapshot_index = 0;
    TimeWindow window;

    AttributedSnapshotGraph() = default;

    /// Builds from a sorted, unique node-id list and unordered weighted pairs
    /// given as (index_u, index_v, weight) with u != v.
    AttributedSnapshotGraph(int index, TimeWindow w, std::vector<std::string> node_ids,
                            const std::vector<std::tuple<int, int, double>>& edges)
        : snapshot_index(index), window(w), node_ids_(std::move(node_ids)) {
        const int n = static_cast<int>(node_ids_.size());
        labels_.assign(n, std::nullopt);
        adj_.assign(n, {});
        for (int i = 0; i < n; ++i) index_of_[node_ids_[i]] = i;
        for (const auto& [u, v, w_uv] : edges) {
            if (u == v) throw std::invalid_argument("self-loop in snapshot edge list");
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw std::invalid_argument("edge endpoint outside node set");
            adj_[u].emplace_back(v, w_uv);
            adj_[v].emplace_back(u, w_uv);
            total_weight_ += w_uv;
            ++edge_count_;
        }
        for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
    }

    int node_count() const { return static_cast<int>(node_ids_.size()); }
    int edge_count() const { return edge_count_; }
    double total_edge_weight() const { return total_weight_; }
    bool empty() const { return node_ids_.empty(); }

    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::string& node_id(int u) const { return node_ids_[static_cast<std::size_t>(u)]; }

    std::optional<int> index_of(const std::string& id) const {
        auto it = index_of_.find(id);
        if (it == index_of_.end()) return std::nullopt;
        return it->second;
    }

    const std::vector<std::pair<int, double>>& neighbors(int u) const {
        return adj_[static_cast<std::size_t>(u)];
    }

    double weighted_degree(int u) const {
        double d = 0.0;
        for (const auto& [v, w] : adj_[static_cast<std::size_t>(u)]) d += w;
        return d;
    }

    std::optional<Leaning> label(int u) const { return labels_[static_cast<std::size_t>(u)]; }
    void set_label(int u, Leaning l) { labels_[static_cast<std::size_t>(u)] = l; }

    bool fully_labeled() const {
        for (const auto& l : labels_)
            if (!l) return false;
        return true;
    }

private:
    std::vector<std::string> node_ids_;                     // sorted
    std::unordered_map<std::string, int> index_of_;
    std::vector<std::optional<Leaning>> labels_;
    std::vector<std::vector<std::pair<int, double>>> adj_;  // sorted by neighbor index
    double total_weight_ = 0.0;
    int edge_count_ = 0;
};

/// Ordered sequence of snapshot graphs over contiguous windows, plus the
/// controversy name.
struct DynamicNetwork {
    std::vector<AttributedSnapshotGraph> snapshots;
    std::string topic;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace detail

/// Buckets events into half-open windows [origin + k*len, origin + (k+1)*len)
/// and builds one snapshot per window intersecting the event range. Self-replies
/// never create edges; users appearing only through self-replies are dropped.
/// Events with a missing actor or target are skipped with a diagnostic.
/// Deterministic and independent of event order.
inline DynamicNetwork build_snapshots(const std::vector<InteractionEvent>& events,
                                      std::int64_t window_length, std::int64_t origin,
                                      std::vector<std::string>* diagnostics = nullptr,
                                      std::string topic = "") {
    if (events.empty()) throw NoDataError("build_snapshots: empty event stream");
    if (window_length <= 0) throw std::invalid_argument("build_snapshots: window_length must be > 0");

    std::int64_t k_min = INT64_MAX, k_max = INT64_MIN;
    std::vector<std::pair<std::int64_t, const InteractionEvent*>> placed;
    placed.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.actor.empty() || e.target.empty()) {
            if (diagnostics)
                diagnostics->push_back("event #" + std::to_string(i) + ": missing " +
                                       (e.actor.empty() ? "actor" : "target"));
            continue;
        }
        const std::int64_t k = detail::floor_div(e.timestamp - origin, window_length);
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
        placed.emplace_back(k, &e);
    }
    if (placed.empty()) throw NoDataError("build_snapshots: no usable events");

    const int n_windows = static_cast<int>(k_max - k_min + 1);

    // Per window: weight per unordered id pair. std::map keeps edge and node
    // order canonical regardless of the input order.
    std::vector<std::map<std::pair<std::string, std::string>, double>> buckets(
        static_cast<std::size_t>(n_windows));
    for (const auto& [k, e] : placed) {
        if (e->is_self_reply()) continue;  // recorded but never an edge
        auto key = e->actor < e->target ? std::make_pair(e->actor, e->target)
                                        : std::make_pair(e->target, e->actor);
        buckets[static_cast<std::size_t>(k - k_min)][key] += 1.0;
    }

    DynamicNetwork net;
    net.topic = std::move(topic);
    net.snapshots.reserve(static_cast<std::size_t>(n_windows));
    for (int s = 0; s < n_windows; ++s) {
        const std::int64_t k = k_min + s;
        TimeWindow w{origin + k * window_length, origin + (k + 1) * window_length};
        std::vector<std::string> ids;
        for (const auto& [pair, weight] : buckets[static_cast<std::size_t>(s)]) {
            (void)weight;
            ids.push_back(pair.first);
            ids.push_back(pair.second);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::unordered_map<std::string, int> idx;
        for (int i = 0; i < static_cast<int>(ids.size()); ++i) idx[ids[static_cast<std::size_t>(i)]] = i;
        std::vector<std::tuple<int, int, double>> edges;
        edges.reserve(buckets[static_cast<std::size_t>(s)].size());
        for (const auto& [pair, weight] : buckets[static_cast<std::size_t>(s)])
            edges.emplace_back(idx[pair.first], idx[pair.second], weight);
        net.snapshots.emplace_back(s, w, std::move(ids), edges);
    }
    return net;
}

struct DegreeStats {
    int node_count = 0;
    int edge_count = 0;
    double average_degree = 0.0;
    double density = 0.0;
    bool density_defined = false;  // false when |V| < 2
};

/// Unweighted aggregates: average degree 2|E|/|V|, density 2|E|/(|V|(|V|-1)).
inline DegreeStats degree_stats(const AttributedSnapshotGraph& g) {
    DegreeStats s;
    s.node_count = g.node_count();
    s.edge_count = g.edge_count();
    if (s.node_count > 0)
        s.average_degree = 2.0 * s.edge_count / s.node_count;
    if (s.node_count >= 2) {
        s.density = 2.0 * s.edge_count / (static_cast<double>(s.node_count) * (s.node_count - 1));
        s.density_defined = true;
    }
    return s;
}

}  // namespace echotrack
