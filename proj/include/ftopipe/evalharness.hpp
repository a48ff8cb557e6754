// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ftopipe/corpus.hpp"
#include "ftopipe/ranker.hpp"
#include "ftopipe/scorer.hpp"
#include "ftopipe/slicer.hpp"

namespace ftopipe {

// ---------------------------------------------------------------------------
// Synthetic corpora

/// Each synthetic patent owns `topic_vocab_size` private words; all patents
/// share `shared_vocab_size` boilerplate words. Descriptions, abstracts and
/// independent claims draw mostly from the private set, which plants an
/// own-claim lexical affinity.
struct SynthSpec {
    std::size_t n_patents = 150;
    std::size_t topic_vocab_size = 40;
    std::size_t shared_vocab_size = 300;
    std::size_t words_per_description = 600;
    std::size_t abstract_words = 60;
    std::size_t claim_words = 40;
    /// Probability that a description word comes from the private set.
    /// Abstracts and claims use a higher share.
    double topic_share = 0.5;
    std::string classification = "G06T1/60";
    std::uint64_t seed = 0;
};

/// Throws InvalidSpec for n_patents < 2, zero sizes, or a share outside [0, 1].
std::vector<PatentDoc> synth_corpus(const SynthSpec& spec);

/// The pseudo-word with the given global index. Distinct indices give
/// distinct words.
std::string synth_word(std::size_t index);

// ---------------------------------------------------------------------------
// Self-retrieval

struct ReferenceResult {
    std::string reference_id;
    int reference_claim = 0;
    /// Rank of the reference's own first independent claim, absent when the
    /// reference is excluded from its candidate list.
    std::optional<std::size_t> self_rank;
    std::size_t candidate_count = 0;
    std::vector<RankedResult> top;
    std::vector<std::string> warnings;
};

struct DatasetStats {
    std::size_t train_docs = 0;
    std::size_t search_docs = 0;
    std::size_t skipped_train_docs = 0;
    std::size_t pieces = 0;
    std::size_t pairs = 0;
    std::size_t positive_pairs = 0;
    std::size_t negative_pairs = 0;
    std::size_t train_pairs = 0;
    std::size_t validation_pairs = 0;
    std::optional<double> train_accuracy;
    std::optional<double> validation_accuracy;
};

struct EvalReport {
    std::vector<ReferenceResult> references;
    double recall_at_1 = 0.0;
    double recall_at_10 = 0.0;
    double mean_reciprocal_rank = 0.0;
    std::optional<DatasetStats> dataset;

    std::string to_json() const;
    /// One text table per reference, separated by blank lines.
    std::string render_tables() const;
};

/// Share of references whose self rank is <= k; an absent rank is a miss.
double recall_at(std::span<const std::optional<std::size_t>> self_ranks, std::size_t k);
/// Mean of 1/rank; an absent rank contributes 0.
double mean_reciprocal_rank(std::span<const std::optional<std::size_t>> self_ranks);

struct SelfRetrievalOptions {
    std::size_t top_k = 10;
    ClaimMode claim_mode = ClaimMode::FirstOnly;
    bool exclude_references = false;
    const Vocabulary* vocab = nullptr;
    std::size_t max_len = kDefaultMaxLen;
};

/// For every reference, ranks all pool candidates against the reference
/// abstract and records where the reference's own first independent claim
/// lands. Pool docs without an independent claim are not candidates.
/// Throws ReferenceNotInPool.
EvalReport self_retrieval_eval(std::span<const PatentDoc> references, std::span<const PatentDoc> search_pool,
                               PairScorer& scorer, const SelfRetrievalOptions& options = {});

// ---------------------------------------------------------------------------
// Experiment

struct ExperimentConfig {
    std::optional<std::filesystem::path> corpus_path;
    std::optional<SynthSpec> synth;

    std::string train_class_prefix;
    std::string search_class_prefix;
    std::set<std::string> languages;

    /// Explicit pools; when empty the search pool is a seeded sample of the
    /// search-class docs and the training pool is everything else in the
    /// training class.
    std::vector<std::string> train_ids;
    std::vector<std::string> search_ids;
    double search_fraction = 1.0 / 3.0;
    std::optional<std::size_t> train_count;

    std::vector<std::string> reference_ids;
    std::size_t n_references = 5;
    bool exclude_references = false;

    SliceBounds bounds;
    /// Claims used to build training pairs.
    ClaimMode claim_mode = ClaimMode::FirstOnly;
    /// Claims ranked in the search pool.
    ClaimMode search_claim_mode = ClaimMode::FirstOnly;
    double validation_fraction = 0.1;
    std::size_t max_len = kDefaultMaxLen;

    std::string scorer = "baseline";  // "baseline" | "external"
    std::string endpoint_command;
    std::size_t epochs = 200;
    double learning_rate = 0.1;

    std::uint64_t seed = 0;
    std::size_t top_k = 10;
    std::filesystem::path output_dir;

    /// Resolved settings for the run directory. output_dir is not echoed so
    /// that identical runs into different directories match byte for byte.
    std::string to_json() const;
    /// Missing keys keep their defaults. Throws SchemaError.
    static ExperimentConfig from_json(std::string_view text);
};

/// Builds the training pool and pair dataset, trains or attaches the scorer,
/// builds the disjoint search pool, ranks and reports. Artifacts go to
/// config.output_dir when it is set. Throws OverlapDetected when the pools
/// intersect.
EvalReport run_experiment(const ExperimentConfig& config);

}  // namespace ftopipe
