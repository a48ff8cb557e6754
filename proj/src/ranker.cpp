// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/ranker.hpp"

#include <algorithm>
#include <sstream>

#include "ftopipe/error.hpp"
#include "ftopipe/text.hpp"
#include "json.hpp"

namespace ftopipe {

std::string candidate_key(const CandidateClaim& claim) {
    return claim.patent_id + "#" + std::to_string(claim.claim_number);
}

namespace {

bool needs_truncation(const std::string& desc, const std::string& claim, const QueryOptions& options) {
    std::size_t n = 0;
    if (options.vocab) {
        n = wordpiece_tokenize(desc, *options.vocab).size() + wordpiece_tokenize(claim, *options.vocab).size();
    } else {
        n = basic_tokenize(desc).size() + basic_tokenize(claim).size();
    }
    return n + 3 > options.max_len;
}

}  // namespace

QueryBatch build_query_inputs(const std::string& query_id, const std::string& description_ip,
                              std::span<const PatentDoc> candidates, const QueryOptions& options) {
    if (count_words(description_ip) == 0) throw Error(ErrorCode::InvalidArgument, "description_ip is empty");
    QueryBatch batch;
    for (const auto& doc : candidates) {
        for (auto& claim : independent_claims(doc, options.claim_mode)) {
            batch.inputs.push_back(QueryInput{query_id, description_ip, {doc.id, claim.number, std::move(claim.text)}});
        }
    }
    std::vector<char> long_pair(batch.inputs.size(), 0);
    const auto n = static_cast<std::int64_t>(batch.inputs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& in = batch.inputs[static_cast<std::size_t>(i)];
        long_pair[static_cast<std::size_t>(i)] = needs_truncation(in.description_ip, in.candidate.text, options);
    }
    for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
        if (!long_pair[i]) continue;
        batch.warnings.push_back("query " + query_id + " with claim " + candidate_key(batch.inputs[i].candidate) +
                                 " exceeds max_len " + std::to_string(options.max_len) + " and will be truncated");
    }
    return batch;
}

bool ranks_before(const RankedResult& a, const RankedResult& b) {
    if (a.logit_1 != b.logit_1) return a.logit_1 > b.logit_1;
    if (a.patent_id != b.patent_id) return a.patent_id < b.patent_id;
    return a.claim_number < b.claim_number;
}

std::vector<RankedResult> order_scored(std::span<const QueryInput> inputs, std::span<const ScoreResult> scores,
                                       std::size_t top_k) {
    if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
    if (inputs.size() != scores.size()) {
        throw Error(ErrorCode::InvalidArgument, "scorer returned " + std::to_string(scores.size()) +
                                                    " results for " + std::to_string(inputs.size()) + " inputs");
    }
    std::vector<RankedResult> results;
    results.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        results.push_back(RankedResult{0, inputs[i].candidate.patent_id, inputs[i].candidate.claim_number,
                                       scores[i].logit_1, scores[i].prob_1});
    }
    std::stable_sort(results.begin(), results.end(), ranks_before);
    if (results.size() > top_k) results.resize(top_k);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
    return results;
}

Ranking rank(const std::string& query_id, const std::string& description_ip, std::span<const PatentDoc> candidates,
             PairScorer& scorer, std::size_t top_k, const QueryOptions& options) {
    if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
    QueryBatch batch = build_query_inputs(query_id, description_ip, candidates, options);

    std::vector<ScoreRequest> requests;
    requests.reserve(batch.inputs.size());
    for (const auto& in : batch.inputs) {
        requests.push_back(ScoreRequest{in.query_id, candidate_key(in.candidate), in.description_ip, in.candidate.text});
    }
    const auto scores = scorer.score(requests);
    return Ranking{order_scored(batch.inputs, scores, top_k), std::move(batch.warnings)};
}

std::string to_json_line(const RankedResult& result) {
    nlohmann::ordered_json obj;
    obj["rank"] = result.rank;
    obj["patent_id"] = result.patent_id;
    obj["claim_number"] = result.claim_number;
    obj["logit_1"] = result.logit_1;
    obj["prob_1"] = result.prob_1;
    return obj.dump();
}

std::string render_table(const std::string& reference_label, const std::string& reference_id,
                         std::span<const RankedResult> results) {
    const std::string right_header = "Pos. / FTO-patent";
    std::vector<std::string> right;
    for (const auto& r : results) {
        std::string cell = std::to_string(r.rank) + ". " + r.patent_id;
        if (r.claim_number != 1) cell += " (claim " + std::to_string(r.claim_number) + ")";
        right.push_back(std::move(cell));
    }
    std::size_t left_w = std::max(reference_label.size(), reference_id.size());
    std::size_t right_w = right_header.size();
    for (const auto& c : right) right_w = std::max(right_w, c.size());

    std::ostringstream out;
    const std::string rule = "+" + std::string(left_w + 2, '-') + "+" + std::string(right_w + 2, '-') + "+\n";
    auto row = [&](const std::string& l, const std::string& r) {
        out << "| " << l << std::string(left_w - l.size(), ' ') << " | " << r << std::string(right_w - r.size(), ' ')
            << " |\n";
    };
    out << rule;
    row(reference_label, right_header);
    out << rule;
    if (right.empty()) row(reference_id, "");
    for (std::size_t i = 0; i < right.size(); ++i) row(i == 0 ? reference_id : "", right[i]);
    out << rule;
    return out.str();
}

}  // namespace ftopipe
