#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "echotrack/detection.hpp"
#include "echotrack/eva.hpp"
#include "echotrack/graph.hpp"
#include "echotrack/lifecycle.hpp"
#include "echotrack/valence.hpp"

namespace echotrack {

/// Shortest round-trip decimal form, identical across platforms (CSV/JSON
/// reports are byte-compared between runs).
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct RejectedLine {
    int line_no = 0;  // 1-based
    std::string reason;
    std::string content;
};

namespace detail {

inline std::optional<std::string> take_string(const nlohmann::json& obj, const char* key,
                                              std::string* out) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) return std::string(key) + " is not a string";
    *out = it->get<std::string>();
    return std::nullopt;
}

}  // namespace detail

/// Reads line-delimited JSON interaction records. Lines that are not valid
/// JSON objects, carry wrong-typed fields, or hold an out-of-range
/// prediction_score are collected into `rejects` and skipped; records merely
/// missing actor or target flow through for the snapshot builder to
/// diagnose. Blank lines are ignored.
inline std::vector<InteractionEvent> read_events_jsonl(const std::string& path,
                                                       std::vector<RejectedLine>* rejects = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open events file: " + path);
    std::vector<InteractionEvent> events;
    std::string line;
    int line_no = 0;
    auto reject = [&](const std::string& reason) {
        if (rejects) rejects->push_back({line_no, reason, line});
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parsed = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            reject("not a JSON object");
            continue;
        }
        InteractionEvent e;
        std::string type_error;
        for (auto [key, dest] : {std::pair{"actor", &e.actor},
                                 {"target", &e.target},
                                 {"doc_id", &e.doc_id},
                                 {"topic_id", &e.topic_id},
                                 {"text", &e.text}}) {
            if (auto err = detail::take_string(parsed, key, dest)) {
                type_error = *err;
                break;
            }
        }
        if (!type_error.empty()) {
            reject(type_error);
            continue;
        }
        if (auto it = parsed.find("timestamp"); it != parsed.end()) {
            if (!it->is_number_integer()) {
                reject("timestamp is not an integer");
                continue;
            }
            e.timestamp = it->get<std::int64_t>();
        } else {
            reject("timestamp missing");
            continue;
        }
        if (auto it = parsed.find("prediction_score"); it != parsed.end()) {
            if (!it->is_number()) {
                reject("prediction_score is not a number");
                continue;
            }
            const double score = it->get<double>();
            if (!(score >= 0.0 && score <= 1.0)) {
                reject("prediction_score outside [0,1]");
                continue;
            }
            e.prediction_score = score;
        }
        if (auto it = parsed.find("keywords"); it != parsed.end()) {
            if (!it->is_array()) {
                reject("keywords is not an array");
                continue;
            }
            bool ok = true;
            for (const auto& k : *it) {
                if (!k.is_string()) {
                    ok = false;
                    break;
                }
                e.keywords.push_back(k.get<std::string>());
            }
            if (!ok) {
                reject("keywords entries must be strings");
                continue;
            }
        }
        events.push_back(std::move(e));
    }
    return events;
}

inline void write_events_jsonl(std::ostream& out, const std::vector<InteractionEvent>& events) {
    for (const auto& e : events) {
        nlohmann::json obj;
        obj["actor"] = e.actor;
        obj["target"] = e.target;
        obj["timestamp"] = e.timestamp;
        if (e.prediction_score) obj["prediction_score"] = *e.prediction_score;
        if (!e.doc_id.empty()) obj["doc_id"] = e.doc_id;
        if (!e.topic_id.empty()) obj["topic_id"] = e.topic_id;
        if (!e.keywords.empty()) obj["keywords"] = e.keywords;
        if (!e.text.empty()) obj["text"] = e.text;
        out << obj.dump() << '\n';
    }
}

inline void write_events_jsonl(const std::string& path, const std::vector<InteractionEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write events file: " + path);
    write_events_jsonl(out, events);
}

/// `user_id<TAB>score` lines supplying externally computed leanings.
/// Malformed or out-of-range lines are rejected per-line.
inline std::vector<std::pair<std::string, double>> read_sidecar(
    const std::string& path, std::vector<RejectedLine>* rejects = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sidecar file: " + path);
    std::vector<std::pair<std::string, double>> entries;
    std::string line;
    int line_no = 0;
    auto reject = [&](const std::string& reason) {
        if (rejects) rejects->push_back({line_no, reason, line});
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            reject("expected user_id<TAB>score");
            continue;
        }
        double score = 0.0;
        const char* first = line.data() + tab + 1;
        const char* last = line.data() + line.size();
        const auto parsed = std::from_chars(first, last, score);
        if (parsed.ec != std::errc{} || parsed.ptr != last) {
            reject("unparsable score");
            continue;
        }
        if (!(score >= 0.0 && score <= 1.0)) {
            reject("score outside [0,1]");
            continue;
        }
        entries.emplace_back(line.substr(0, tab), score);
    }
    return entries;
}

inline void write_rejects(const std::string& path, const std::vector<RejectedLine>& rejects) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write rejects file: " + path);
    for (const auto& r : rejects) out << r.line_no << '\t' << r.reason << '\t' << r.content << '\n';
}

// ---- report writers ------------------------------------------------------

inline void write_partition_csv(std::ostream& out, const DynamicNetwork& net,
                                const std::vector<Partition>& partitions) {
    out << "snapshot_index,user_id,community_id\n";
    for (std::size_t t = 0; t < partitions.size(); ++t) {
        const auto& g = net.snapshots.at(t);
        const auto& p = partitions[t];
        for (int u = 0; u < g.node_count(); ++u)
            out << p.snapshot_index << ',' << g.node_id(u) << ','
                << p.assignment[static_cast<std::size_t>(u)] << '\n';
    }
}

inline void write_assessments_csv(std::ostream& out,
                                  const std::vector<std::vector<CommunityAssessment>>& per_snapshot) {
    out << "snapshot,community,size,purity,conductance,is_ec\n";
    for (const auto& snapshot : per_snapshot)
        for (const auto& a : snapshot)
            out << a.snapshot_index << ',' << a.community_id << ',' << a.size << ','
                << format_double(a.purity) << ',' << format_double(a.conductance) << ','
                << (a.is_ec ? "true" : "false") << '\n';
}

inline void write_scatter_csv(std::ostream& out, const ScatterTable& table) {
    out << "snapshot,community,purity,inv_conductance,size,is_ec\n";
    for (const auto& p : table.points)
        out << p.snapshot_index << ',' << p.community_id << ',' << format_double(p.purity) << ','
            << format_double(p.inv_conductance) << ',' << p.size << ','
            << (p.is_ec ? "true" : "false") << '\n';
}

inline void write_stability_csv(std::ostream& out, const std::vector<LifecycleChain>& chains) {
    out << "chain_id,pair_index,jaccard,is_ec_left,is_ec_right\n";
    for (const auto& chain : chains)
        for (std::size_t i = 0; i < chain.jaccard_series.size(); ++i)
            out << chain.chain_id << ',' << i << ',' << format_double(chain.jaccard_series[i])
                << ',' << (chain.steps[i].is_ec ? "true" : "false") << ','
                << (chain.steps[i + 1].is_ec ? "true" : "false") << '\n';
}

inline void write_valence_csv(std::ostream& out, const ValenceReport& report) {
    out << "topic,membership,mean_valence,doc_count\n";
    for (const auto& row : report.rows)
        out << row.topic_id << ',' << membership_to_string(row.ec_member) << ','
            << (row.mean_valence ? format_double(*row.mean_valence) : std::string("undefined"))
            << ',' << row.doc_count << '\n';
}

template <typename WriteFn>
inline void write_file(const std::string& path, WriteFn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    fn(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace echotrack
