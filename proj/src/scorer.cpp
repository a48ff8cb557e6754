// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ftopipe/error.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/text.hpp"
#include "json.hpp"

namespace ftopipe {

std::array<double, 2> softmax(double logit_0, double logit_1) {
    if (!std::isfinite(logit_0) || !std::isfinite(logit_1)) {
        throw Error(ErrorCode::NonFiniteInput, "softmax input must be finite");
    }
    const double m = std::max(logit_0, logit_1);
    const double e0 = std::exp(logit_0 - m);
    const double e1 = std::exp(logit_1 - m);
    const double z = e0 + e1;
    return {e0 / z, e1 / z};
}

ScoreResult make_score_result(std::string query_id, std::string candidate_id, double logit_0, double logit_1) {
    const auto probs = softmax(logit_0, logit_1);
    return ScoreResult{std::move(query_id), std::move(candidate_id), logit_0, logit_1, probs[1]};
}

// ---------------------------------------------------------------------------
// IDF

IdfTable IdfTable::build(std::span<const std::string> documents) {
    IdfTable table;
    table.documents_ = documents.size();
    for (const auto& doc : documents) {
        const auto tokens = basic_tokenize(doc);
        const std::set<std::string> unique(tokens.begin(), tokens.end());
        for (const auto& t : unique) ++table.df_[t];
    }
    return table;
}

IdfTable IdfTable::uniform() {
    IdfTable table;
    table.uniform_ = true;
    return table;
}

IdfTable IdfTable::from_frequencies(std::size_t documents, std::map<std::string, std::size_t> df) {
    IdfTable table;
    table.documents_ = documents;
    table.df_ = std::move(df);
    return table;
}

double IdfTable::idf(const std::string& token) const {
    if (uniform_) return 1.0;
    const auto it = df_.find(token);
    const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((static_cast<double>(documents_) + 1.0) / (df + 1.0)) + 1.0;
}

// ---------------------------------------------------------------------------
// Features

FeatureVector extract_features(std::string_view desc_text, std::string_view claim_text, const IdfTable& idf) {
    const auto desc = basic_tokenize(desc_text);
    const auto claim = basic_tokenize(claim_text);

    std::map<std::string, double> desc_counts;
    std::map<std::string, double> claim_counts;
    for (const auto& t : desc) desc_counts[t] += 1.0;
    for (const auto& t : claim) claim_counts[t] += 1.0;

    double dot = 0.0;
    double desc_norm = 0.0;
    double claim_norm = 0.0;
    std::size_t overlap = 0;
    for (const auto& [token, count] : desc_counts) {
        const double w = idf.idf(token);
        desc_norm += (count * w) * (count * w);
        if (const auto it = claim_counts.find(token); it != claim_counts.end()) {
            dot += (count * w) * (it->second * w);
            ++overlap;
        }
    }
    for (const auto& [token, count] : claim_counts) {
        const double w = idf.idf(token);
        claim_norm += (count * w) * (count * w);
    }

    FeatureVector f{};
    if (desc_norm > 0.0 && claim_norm > 0.0) f[0] = dot / (std::sqrt(desc_norm) * std::sqrt(claim_norm));
    if (!claim_counts.empty()) f[1] = static_cast<double>(overlap) / static_cast<double>(claim_counts.size());
    const std::size_t union_size = desc_counts.size() + claim_counts.size() - overlap;
    if (union_size > 0) f[2] = static_cast<double>(overlap) / static_cast<double>(union_size);
    if (!desc.empty() && !claim.empty()) {
        f[3] = std::log(static_cast<double>(desc.size()) / static_cast<double>(claim.size()));
    }
    f[4] = static_cast<double>(overlap);
    return f;
}

MinMaxNormalization MinMaxNormalization::fit(std::span<const FeatureVector> rows) {
    MinMaxNormalization norm;
    if (rows.empty()) return norm;
    norm.min = rows.front();
    norm.max = rows.front();
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            norm.min[j] = std::min(norm.min[j], row[j]);
            norm.max[j] = std::max(norm.max[j], row[j]);
        }
    }
    return norm;
}

FeatureVector MinMaxNormalization::apply(const FeatureVector& raw) const {
    FeatureVector out{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const double range = max[j] - min[j];
        out[j] = range > 0.0 ? (raw[j] - min[j]) / range : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model

double BaselineModel::margin(const FeatureVector& raw) const {
    const FeatureVector x = normalization.apply(raw);
    double z = bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j) z += weights[j] * x[j];
    return z;
}

std::string BaselineModel::to_json() const {
    nlohmann::ordered_json obj;
    obj["version"] = kBaselineModelVersion;
    auto names = nlohmann::ordered_json::array();
    for (auto n : kFeatureNames) names.push_back(std::string(n));
    obj["feature_names"] = std::move(names);
    obj["weights"] = weights;
    obj["bias"] = bias;
    obj["normalization"] = {{"min", normalization.min}, {"max", normalization.max}};
    nlohmann::ordered_json df = nlohmann::ordered_json::object();
    for (const auto& [token, count] : idf.document_frequencies()) df[token] = count;
    obj["idf"] = {{"uniform", idf.is_uniform()}, {"documents", idf.document_count()}, {"df", std::move(df)}};
    return obj.dump(2) + "\n";
}

BaselineModel BaselineModel::from_json(std::string_view text) {
    const auto obj = nlohmann::json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw Error(ErrorCode::SchemaError, "model file is not a JSON object");
    try {
        if (obj.at("version").get<int>() != kBaselineModelVersion) {
            throw Error(ErrorCode::SchemaError, "unsupported model version");
        }
        const auto names = obj.at("feature_names").get<std::vector<std::string>>();
        if (names.size() != kFeatureCount ||
            !std::equal(names.begin(), names.end(), kFeatureNames.begin())) {
            throw Error(ErrorCode::SchemaError, "feature_names do not match this build");
        }
        BaselineModel model;
        model.weights = obj.at("weights").get<FeatureVector>();
        model.bias = obj.at("bias").get<double>();
        model.normalization.min = obj.at("normalization").at("min").get<FeatureVector>();
        model.normalization.max = obj.at("normalization").at("max").get<FeatureVector>();
        const auto& idf = obj.at("idf");
        if (idf.at("uniform").get<bool>()) {
            model.idf = IdfTable::uniform();
        } else {
            model.idf = IdfTable::from_frequencies(idf.at("documents").get<std::size_t>(),
                                                   idf.at("df").get<std::map<std::string, std::size_t>>());
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, e.what());
    }
}

void BaselineModel::save(const std::filesystem::path& path) const { write_text(path, to_json()); }

BaselineModel BaselineModel::load(const std::filesystem::path& path) { return from_json(read_text(path)); }

// ---------------------------------------------------------------------------
// Training

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct BatchState {
    double loss = 0.0;
    std::size_t correct = 0;
};

BatchState evaluate(std::span<const FeatureVector> rows, std::span<const int> labels, const FeatureVector& w,
                    double b, std::vector<double>* residuals) {
    const auto n = static_cast<std::int64_t>(rows.size());
    std::vector<double> losses(rows.size());
    std::vector<char> hits(rows.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double z = b;
        for (std::size_t j = 0; j < kFeatureCount; ++j) z += w[j] * rows[k][j];
        const double y = labels[k] == kMatchedLabel ? 1.0 : 0.0;
        losses[k] = softplus(z) - y * z;
        hits[k] = (z > 0.0) == (y > 0.5);
        if (residuals) (*residuals)[k] = sigmoid(z) - y;
    }
    BatchState state;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        state.loss += losses[k];
        state.correct += static_cast<std::size_t>(hits[k]);
    }
    state.loss /= static_cast<double>(std::max<std::size_t>(rows.size(), 1));
    return state;
}

}  // namespace

LogisticFit fit_logistic(std::span<const FeatureVector> rows, std::span<const int> labels, std::size_t epochs,
                         double learning_rate) {
    if (rows.size() != labels.size()) throw Error(ErrorCode::InvalidArgument, "rows and labels differ in length");
    LogisticFit fit;
    if (rows.empty()) return fit;

    const double inv_n = 1.0 / static_cast<double>(rows.size());
    std::vector<double> residuals(rows.size());
    BatchState state = evaluate(rows, labels, fit.weights, fit.bias, &residuals);
    fit.loss_trace.push_back(state.loss);
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        FeatureVector grad{};
        double grad_b = 0.0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            for (std::size_t j = 0; j < kFeatureCount; ++j) grad[j] += residuals[k] * rows[k][j];
            grad_b += residuals[k];
        }
        for (std::size_t j = 0; j < kFeatureCount; ++j) fit.weights[j] -= learning_rate * grad[j] * inv_n;
        fit.bias -= learning_rate * grad_b * inv_n;
        state = evaluate(rows, labels, fit.weights, fit.bias, &residuals);
        fit.loss_trace.push_back(state.loss);
    }
    fit.accuracy = static_cast<double>(state.correct) * inv_n;
    return fit;
}

TrainResult train_baseline(std::span<const TrainingPair> pairs, const TrainOptions& options) {
    bool has_pos = false;
    bool has_neg = false;
    for (const auto& p : pairs) (p.label == kMatchedLabel ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClassDataset, "training pairs must contain both labels");

    std::vector<std::string> documents;
    {
        std::unordered_set<std::string_view> seen;
        for (const auto& p : pairs) {
            if (seen.insert(p.description_text).second) documents.push_back(p.description_text);
            if (seen.insert(p.claim_text).second) documents.push_back(p.claim_text);
        }
    }

    BaselineModel model;
    model.idf = IdfTable::build(documents);

    std::vector<FeatureVector> raw(pairs.size());
    std::vector<int> labels(pairs.size());
    const auto n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        raw[k] = extract_features(pairs[k].description_text, pairs[k].claim_text, model.idf);
        labels[k] = pairs[k].label;
    }

    model.normalization = MinMaxNormalization::fit(raw);
    std::vector<FeatureVector> rows(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) rows[k] = model.normalization.apply(raw[k]);

    LogisticFit fit = fit_logistic(rows, labels, options.epochs, options.learning_rate);
    model.weights = fit.weights;
    model.bias = fit.bias;
    return TrainResult{std::move(model), fit.accuracy, std::move(fit.loss_trace)};
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

ScoreResult score_one(const BaselineModel& model, const ScoreRequest& req) {
    const double margin = model.margin(extract_features(req.text_a, req.text_b, model.idf));
    return make_score_result(req.query_id, req.candidate_id, 0.0, margin);
}

}  // namespace

std::vector<ScoreResult> score_batch_baseline(const BaselineModel& model, std::span<const ScoreRequest> requests) {
    std::vector<ScoreResult> out(requests.size());
    const auto n = static_cast<std::int64_t>(requests.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = score_one(model, requests[static_cast<std::size_t>(i)]);
    }
    return out;
}

namespace reference {

std::vector<ScoreResult> score_batch_baseline(const BaselineModel& model, std::span<const ScoreRequest> requests) {
    std::vector<ScoreResult> out;
    out.reserve(requests.size());
    for (const auto& req : requests) out.push_back(score_one(model, req));
    return out;
}

}  // namespace reference

}  // namespace ftopipe
