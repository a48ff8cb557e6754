// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftopipe/pairgen.hpp"

namespace ftopipe {

/// Two-class softmax with max subtraction. Throws NonFiniteInput.
std::array<double, 2> softmax(double logit_0, double logit_1);

struct ScoreRequest {
    std::string query_id;
    std::string candidate_id;
    std::string text_a;  // description side
    std::string text_b;  // claim side
};

struct ScoreResult {
    std::string query_id;
    std::string candidate_id;
    double logit_0 = 0.0;
    double logit_1 = 0.0;
    double prob_1 = 0.5;
};

ScoreResult make_score_result(std::string query_id, std::string candidate_id, double logit_0, double logit_1);

/// Backend-neutral pair scorer. One result per request, in request order.
class PairScorer {
  public:
    virtual ~PairScorer() = default;
    virtual std::vector<ScoreResult> score(std::span<const ScoreRequest> requests) = 0;
};

/// Smoothed inverse document frequency, ln((N + 1) / (df + 1)) + 1, over
/// basic tokens. Unseen tokens get df = 0.
class IdfTable {
  public:
    IdfTable() = default;
    static IdfTable build(std::span<const std::string> documents);
    /// Every token weighs 1.
    static IdfTable uniform();

    double idf(const std::string& token) const;
    std::size_t document_count() const { return documents_; }
    bool is_uniform() const { return uniform_; }

    const std::map<std::string, std::size_t>& document_frequencies() const { return df_; }
    static IdfTable from_frequencies(std::size_t documents, std::map<std::string, std::size_t> df);

  private:
    std::size_t documents_ = 0;
    std::map<std::string, std::size_t> df_;
    bool uniform_ = false;
};

inline constexpr std::size_t kFeatureCount = 5;
using FeatureVector = std::array<double, kFeatureCount>;

/// Order is part of the model file format; bump kBaselineModelVersion when it
/// changes.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "idf_cosine", "claim_containment", "jaccard", "log_length_ratio", "overlap_count"};
inline constexpr int kBaselineModelVersion = 1;

/// Raw (unnormalized) features of a (description, claim) pair:
/// IDF-weighted cosine of token counts, share of distinct claim tokens found
/// in the description, Jaccard of token sets, ln(|desc| / |claim|) in tokens,
/// and the size of the token-set intersection.
FeatureVector extract_features(std::string_view desc_text, std::string_view claim_text, const IdfTable& idf);

struct MinMaxNormalization {
    FeatureVector min{};
    FeatureVector max{};

    static MinMaxNormalization fit(std::span<const FeatureVector> rows);
    /// (x - min) / (max - min); a constant feature maps to 0.
    FeatureVector apply(const FeatureVector& raw) const;
};

struct BaselineModel {
    FeatureVector weights{};
    double bias = 0.0;
    MinMaxNormalization normalization;
    IdfTable idf;

    /// w . normalize(f) + b
    double margin(const FeatureVector& raw) const;

    std::string to_json() const;
    static BaselineModel from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static BaselineModel load(const std::filesystem::path& path);
};

struct LogisticFit {
    FeatureVector weights{};
    double bias = 0.0;
    /// Mean cross-entropy before the first update and after each epoch
    /// (epochs + 1 entries).
    std::vector<double> loss_trace;
    double accuracy = 0.0;
};

/// Full-batch gradient descent on mean binary cross-entropy from zero
/// weights. Per-row gradients are computed in parallel and summed in row
/// order, so the fit is identical for every thread count.
LogisticFit fit_logistic(std::span<const FeatureVector> rows, std::span<const int> labels, std::size_t epochs,
                         double learning_rate);

struct TrainOptions {
    std::size_t epochs = 200;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

struct TrainResult {
    BaselineModel model;
    double accuracy = 0.0;
    std::vector<double> loss_trace;
};

/// IDF is built from the distinct description and claim texts of `pairs`.
/// Throws SingleClassDataset unless both labels occur.
TrainResult train_baseline(std::span<const TrainingPair> pairs, const TrainOptions& options);

/// logit_0 = 0, logit_1 = model margin. OpenMP-parallel over requests.
std::vector<ScoreResult> score_batch_baseline(const BaselineModel& model, std::span<const ScoreRequest> requests);

namespace reference {
std::vector<ScoreResult> score_batch_baseline(const BaselineModel& model, std::span<const ScoreRequest> requests);
}  // namespace reference

class BaselineScorer : public PairScorer {
  public:
    explicit BaselineScorer(BaselineModel model) : model_(std::move(model)) {}
    std::vector<ScoreResult> score(std::span<const ScoreRequest> requests) override {
        return score_batch_baseline(model_, requests);
    }
    const BaselineModel& model() const { return model_; }

  private:
    BaselineModel model_;
};

}  // namespace ftopipe
