// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "ftopipe/corpus.hpp"
#include "ftopipe/encoder.hpp"
#include "ftopipe/scorer.hpp"

namespace ftopipe {

struct CandidateClaim {
    std::string patent_id;
    int claim_number = 0;
    std::string text;
};

/// The invention description paired with one candidate independent claim.
struct QueryInput {
    std::string query_id;
    std::string description_ip;
    CandidateClaim candidate;
};

/// Wire candidate id: "<patent id>#<claim number>".
std::string candidate_key(const CandidateClaim& claim);

struct QueryOptions {
    ClaimMode claim_mode = ClaimMode::FirstOnly;
    /// When set, over-length pairs are detected with the real tokenizer;
    /// otherwise basic tokens are counted.
    const Vocabulary* vocab = nullptr;
    std::size_t max_len = kDefaultMaxLen;
};

struct QueryBatch {
    std::vector<QueryInput> inputs;
    /// One message per pair the encoder would have to truncate.
    std::vector<std::string> warnings;
};

/// One input per (candidate patent, selected independent claim), in candidate
/// order. Throws InvalidArgument for an empty description and propagates
/// NoIndependentClaim.
QueryBatch build_query_inputs(const std::string& query_id, const std::string& description_ip,
                              std::span<const PatentDoc> candidates, const QueryOptions& options = {});

struct RankedResult {
    std::size_t rank = 0;  // 1-based
    std::string patent_id;
    int claim_number = 0;
    double logit_1 = 0.0;
    double prob_1 = 0.0;

    bool operator==(const RankedResult&) const = default;
};

/// Strict weak order used for ranking: logit_1 descending, then patent id,
/// then claim number ascending.
bool ranks_before(const RankedResult& a, const RankedResult& b);

struct Ranking {
    std::vector<RankedResult> results;
    std::vector<std::string> warnings;
};

/// Scores every query input with `scorer` and returns the first top_k in rank
/// order. Throws InvalidArgument when top_k == 0.
Ranking rank(const std::string& query_id, const std::string& description_ip, std::span<const PatentDoc> candidates,
             PairScorer& scorer, std::size_t top_k, const QueryOptions& options = {});

/// Sorts already-scored inputs; `scores[i]` belongs to `inputs[i]`.
std::vector<RankedResult> order_scored(std::span<const QueryInput> inputs, std::span<const ScoreResult> scores,
                                       std::size_t top_k);

std::string to_json_line(const RankedResult& result);

/// Two-column text table: reference id, then "Pos. / FTO-patent" entries.
std::string render_table(const std::string& reference_label, const std::string& reference_id,
                         std::span<const RankedResult> results);

}  // namespace ftopipe
