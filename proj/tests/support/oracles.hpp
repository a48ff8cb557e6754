// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

// Test-only oracles. Each one recomputes a result by a route that does not
// share code with the library path it checks.

#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ftopipe/ranker.hpp"
#include "ftopipe/scorer.hpp"

namespace ftopipe::testing {

inline std::vector<std::string> oracle_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

inline std::string oracle_join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) out += (i ? " " : "") + words[i];
    return out;
}

/// Greedy longest-prefix segmentation of an ASCII word over a token set.
inline std::vector<std::string> oracle_wordpiece(const std::string& word, const std::set<std::string>& vocab) {
    std::vector<std::string> out;
    std::string rest = word;
    bool first = true;
    while (!rest.empty()) {
        std::string found;
        for (std::size_t len = rest.size(); len >= 1; --len) {
            const std::string cand = (first ? "" : "##") + rest.substr(0, len);
            if (vocab.count(cand)) {
                found = cand;
                rest.erase(0, len);
                break;
            }
        }
        if (found.empty()) return {"[UNK]"};
        out.push_back(found);
        first = false;
    }
    return out;
}

/// Closed form of longest-first truncation where ties cut the second segment.
inline std::pair<std::size_t, std::size_t> oracle_truncation(std::size_t a, std::size_t b, std::size_t budget) {
    if (a + b <= budget) return {a, b};
    std::size_t excess = a + b - budget;
    if (a > b && excess <= a - b) return {a - excess, b};
    if (b > a && excess <= b - a) return {a, b - excess};
    const std::size_t level = std::min(a, b);
    excess -= std::max(a, b) - level;
    return {level - excess / 2, level - (excess + 1) / 2};
}

/// Scores each candidate with its own scorer call, then orders by repeated
/// selection of the best remaining entry.
inline std::vector<RankedResult> oracle_rank(const std::string& query_id, const std::string& description,
                                             const std::vector<CandidateClaim>& candidates, PairScorer& scorer) {
    std::vector<RankedResult> pool;
    for (const auto& c : candidates) {
        const ScoreRequest req{query_id, c.patent_id + "#" + std::to_string(c.claim_number), description, c.text};
        const auto res = scorer.score(std::span<const ScoreRequest>(&req, 1));
        pool.push_back(RankedResult{0, c.patent_id, c.claim_number, res.at(0).logit_1, res.at(0).prob_1});
    }
    auto better = [](const RankedResult& x, const RankedResult& y) {
        if (x.logit_1 > y.logit_1) return true;
        if (x.logit_1 < y.logit_1) return false;
        if (x.patent_id != y.patent_id) return x.patent_id < y.patent_id;
        return x.claim_number < y.claim_number;
    };
    std::vector<RankedResult> out;
    while (!pool.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pool.size(); ++i) {
            if (better(pool[i], pool[best])) best = i;
        }
        out.push_back(pool[best]);
        out.back().rank = out.size();
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return out;
}

}  // namespace ftopipe::testing
