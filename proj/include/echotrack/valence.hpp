#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace echotrack {

inline std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// word -> pleasantness in [0,1]; lookups are case-insensitive.
struct ValenceLexicon {
    std::map<std::string, double> entries;

    std::size_t size() const { return entries.size(); }

    std::optional<double> lookup(const std::string& word) const {
        auto it = entries.find(to_lower(word));
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }
};

/// Parses a `word<TAB>valence` file. Duplicate words keep the last occurrence
/// (with a warning); lines with values outside [0,1] or unparsable fields are
/// rejected per-line. Fails hard on an unreadable file or zero valid entries.
inline ValenceLexicon load_lexicon(const std::string& path,
                                   std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    ValenceLexicon lex;
    std::string line;
    int line_no = 0;
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(path + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            warn("no tab separator; line rejected");
            continue;
        }
        const std::string word = to_lower(line.substr(0, tab));
        const std::string val_text = line.substr(tab + 1);
        double value = 0.0;
        const auto parsed = std::from_chars(val_text.data(), val_text.data() + val_text.size(), value);
        if (parsed.ec != std::errc{} || parsed.ptr != val_text.data() + val_text.size()) {
            warn("unparsable valence '" + val_text + "'; line rejected");
            continue;
        }
        if (word.empty()) {
            warn("empty word; line rejected");
            continue;
        }
        if (!(value >= 0.0 && value <= 1.0)) {
            warn("valence " + val_text + " outside [0,1]; line rejected");
            continue;
        }
        if (lex.entries.count(word)) warn("duplicate word '" + word + "'; last occurrence wins");
        lex.entries[word] = value;
    }
    if (lex.entries.empty()) throw std::runtime_error("lexicon has no valid entries: " + path);
    return lex;
}

namespace detail {

/// Unique lowercase keywords of one document (duplicates count once).
inline std::vector<std::string> unique_keywords(const std::vector<std::string>& keywords) {
    std::set<std::string> seen;
    for (const auto& k : keywords)
        if (!k.empty()) seen.insert(to_lower(k));
    return {seen.begin(), seen.end()};
}

}  // namespace detail

/// Mean lexicon value over the keywords found in the lexicon; absent keywords
/// are excluded from both numerator and denominator. No match -> no value
/// (never silently 0).
inline std::optional<double> valence_score(const std::vector<std::string>& keywords,
                                           const ValenceLexicon& lex) {
    double sum = 0.0;
    int matched = 0;
    for (const auto& k : detail::unique_keywords(keywords)) {
        if (auto v = lex.lookup(k)) {
            sum += *v;
            ++matched;
        }
    }
    if (matched == 0) return std::nullopt;
    return sum / matched;
}

/// Minimal keyword extractor for records that carry raw text instead of
/// precomputed keywords: lowercase, split on non-alphanumerics, drop a short
/// built-in stop-word list, keep unique tokens. Reports that used it are
/// labeled accordingly downstream.
inline std::vector<std::string> fallback_keywords(const std::string& text) {
    static const std::set<std::string> kStopWords = {
        "a",    "an",  "and", "are",  "as",   "at",   "be",   "but", "by",   "for",
        "from", "has", "he",  "her",  "his",  "i",    "in",   "is",  "it",   "its",
        "my",   "of",  "on",  "or",   "she",  "that", "the",  "they", "this", "to",
        "was",  "we",  "were", "with", "you"};
    std::set<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !kStopWords.count(cur)) tokens.insert(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            flush();
    }
    flush();
    return {tokens.begin(), tokens.end()};
}

/// How a (topic, membership) group aggregates its documents' matched
/// keywords: one pooled mean over every matched keyword, or a mean of
/// per-document means (documents without coverage excluded).
enum class ValencePooling { pooled, per_document };

inline std::string to_string(ValencePooling p) {
    return p == ValencePooling::pooled ? "pooled" : "per_document";
}

struct ValenceDoc {
    std::string topic_id;
    bool ec_member = false;
    std::vector<std::string> keywords;
};

struct ValenceRow {
    std::string topic_id;
    bool ec_member = false;
    int doc_count = 0;
    int matched_keyword_count = 0;
    std::optional<double> mean_valence;  // absent iff matched_keyword_count == 0
};

inline std::string membership_to_string(bool ec_member) { return ec_member ? "ec" : "not_ec"; }

struct ValenceReport {
    std::vector<ValenceRow> rows;  // sorted by topic, then not_ec before ec
    ValencePooling pooling = ValencePooling::pooled;
};

/// Per-(topic, membership) average valence. Groups with documents but no
/// lexical coverage get a row without a value; groups with no documents get
/// no row at all.
inline ValenceReport group_valence(const std::vector<ValenceDoc>& docs, const ValenceLexicon& lex,
                                   ValencePooling pooling = ValencePooling::pooled) {
    struct Accum {
        int doc_count = 0;
        int matched = 0;
        double pooled_sum = 0.0;
        double doc_mean_sum = 0.0;
        int docs_with_coverage = 0;
    };
    std::map<std::pair<std::string, bool>, Accum> groups;
    for (const auto& doc : docs) {
        Accum& acc = groups[{doc.topic_id, doc.ec_member}];
        ++acc.doc_count;
        double sum = 0.0;
        int matched = 0;
        for (const auto& k : detail::unique_keywords(doc.keywords)) {
            if (auto v = lex.lookup(k)) {
                sum += *v;
                ++matched;
            }
        }
        if (matched > 0) {
            acc.matched += matched;
            acc.pooled_sum += sum;
            acc.doc_mean_sum += sum / matched;
            ++acc.docs_with_coverage;
        }
    }

    ValenceReport report;
    report.pooling = pooling;
    for (const auto& [key, acc] : groups) {
        ValenceRow row;
        row.topic_id = key.first;
        row.ec_member = key.second;
        row.doc_count = acc.doc_count;
        row.matched_keyword_count = acc.matched;
        if (acc.matched > 0) {
            row.mean_valence = pooling == ValencePooling::pooled
                                   ? acc.pooled_sum / acc.matched
                                   : acc.doc_mean_sum / acc.docs_with_coverage;
        }
        report.rows.push_back(std::move(row));
    }
    return report;  // std::map ordering: topic ascending, not_ec (false) before ec
}

/// Hue band for plotting; cut points default to tertiles.
enum class ValenceBand { negative, neutral, positive };

struct ValenceBandCuts {
    double low = 1.0 / 3.0;
    double high = 2.0 / 3.0;

    void validate() const {
        if (!(low >= 0.0 && low <= high && high <= 1.0))
            throw std::invalid_argument("band cuts need 0 <= low <= high <= 1");
    }
};

inline ValenceBand valence_band(double value, const ValenceBandCuts& cuts = {}) {
    cuts.validate();
    if (value < cuts.low) return ValenceBand::negative;
    if (value < cuts.high) return ValenceBand::neutral;
    return ValenceBand::positive;
}

inline std::string to_string(ValenceBand b) {
    switch (b) {
        case ValenceBand::negative: return "negative";
        case ValenceBand::neutral: return "neutral";
        default: return "positive";
    }
}

}  // namespace echotrack
