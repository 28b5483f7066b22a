#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "echotrack/graph.hpp"

namespace echotrack {

/// Cut points of the three-class discretization: anti iff score <= lower,
/// pro iff score >= upper, neutral otherwise.
struct LeaningThresholds {
    double lower = 0.3;
    double upper = 0.7;

    void validate() const {
        if (!(lower >= 0.0 && lower < upper && upper <= 1.0))
            throw std::invalid_argument("leaning thresholds must satisfy 0 <= lower < upper <= 1");
    }
};

inline Leaning discretize(double score, const LeaningThresholds& t) {
    t.validate();
    if (!(score >= 0.0 && score <= 1.0))
        throw std::domain_error("leaning score outside [0,1]");
    if (score <= t.lower) return Leaning::anti;
    if (score >= t.upper) return Leaning::pro;
    return Leaning::neutral;
}

struct LeaningProfile {
    std::string user_id;
    double score = 0.0;   // arithmetic mean of the user's post scores
    Leaning label = Leaning::neutral;
    int post_count = 0;
};

/// Aggregates per-post prediction scores into one leaning score per user over
/// the events in scope. A user's posts are the events they authored (actor).
/// Users whose posts carry no scores are omitted with a diagnostic; they stay
/// unlabeled downstream. Summation runs over sorted scores, so permuting the
/// event stream cannot change any L_u bit.
inline std::map<std::string, LeaningProfile> compute_leaning(
    const std::vector<InteractionEvent>& events, const LeaningThresholds& thresholds,
    std::optional<TimeWindow> scope = std::nullopt,
    std::vector<std::string>* diagnostics = nullptr) {
    thresholds.validate();
    std::map<std::string, std::vector<double>> scores;
    std::map<std::string, int> unscored;
    for (const auto& e : events) {
        if (e.actor.empty()) continue;
        if (scope && !scope->contains(e.timestamp)) continue;
        if (e.prediction_score) {
            if (!(*e.prediction_score >= 0.0 && *e.prediction_score <= 1.0))
                throw std::domain_error("prediction_score outside [0,1] for user " + e.actor);
            scores[e.actor].push_back(*e.prediction_score);
        } else {
            ++unscored[e.actor];
        }
    }

    std::map<std::string, LeaningProfile> profiles;
    for (auto& [user, vals] : scores) {
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (double v : vals) sum += v;
        LeaningProfile p;
        p.user_id = user;
        p.post_count = static_cast<int>(vals.size());
        p.score = sum / p.post_count;
        p.label = discretize(p.score, thresholds);
        profiles.emplace(user, std::move(p));
    }
    if (diagnostics) {
        for (const auto& [user, n] : unscored) {
            if (!profiles.count(user))
                diagnostics->push_back("user " + user + ": " + std::to_string(n) +
                                       " posts but no prediction scores; left unlabeled");
        }
    }
    return profiles;
}

/// Applies sidecar overrides (user -> score). Existing profiles keep their
/// post count; new users get post_count 1, the sidecar line being the single
/// scored item behind the profile.
inline void merge_sidecar(std::map<std::string, LeaningProfile>& profiles,
                          const std::map<std::string, double>& sidecar,
                          const LeaningThresholds& thresholds) {
    for (const auto& [user, score] : sidecar) {
        auto it = profiles.find(user);
        if (it == profiles.end()) {
            LeaningProfile p;
            p.user_id = user;
            p.score = score;
            p.label = discretize(score, thresholds);
            p.post_count = 1;
            profiles.emplace(user, std::move(p));
        } else {
            it->second.score = score;
            it->second.label = discretize(score, thresholds);
        }
    }
}

/// Rebuilds a snapshot keeping only nodes with a profile, attaching labels.
/// Nodes left without edges survive; EVA treats them as singletons.
inline AttributedSnapshotGraph label_snapshot(const AttributedSnapshotGraph& g,
                                              const std::map<std::string, LeaningProfile>& profiles) {
    std::vector<std::string> kept;
    for (const auto& id : g.node_ids())
        if (profiles.count(id)) kept.push_back(id);
    std::map<std::string, int> idx;
    for (int i = 0; i < static_cast<int>(kept.size()); ++i) idx[kept[static_cast<std::size_t>(i)]] = i;

    std::vector<std::tuple<int, int, double>> edges;
    for (int u = 0; u < g.node_count(); ++u) {
        auto it_u = idx.find(g.node_id(u));
        if (it_u == idx.end()) continue;
        for (const auto& [v, w] : g.neighbors(u)) {
            if (v <= u) continue;
            auto it_v = idx.find(g.node_id(v));
            if (it_v == idx.end()) continue;
            edges.emplace_back(it_u->second, it_v->second, w);
        }
    }
    AttributedSnapshotGraph out(g.snapshot_index, g.window, std::move(kept), edges);
    for (int i = 0; i < out.node_count(); ++i)
        out.set_label(i, profiles.at(out.node_id(i)).label);
    return out;
}

/// Labels every snapshot from one global profile map, excluding unlabeled
/// users. The network is only valid for detection after this step.
inline DynamicNetwork apply_labels(const DynamicNetwork& net,
                                   const std::map<std::string, LeaningProfile>& profiles) {
    DynamicNetwork out;
    out.topic = net.topic;
    out.snapshots.reserve(net.snapshots.size());
    for (const auto& g : net.snapshots) out.snapshots.push_back(label_snapshot(g, profiles));
    return out;
}

}  // namespace echotrack
