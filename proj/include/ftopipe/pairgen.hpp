// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ftopipe/corpus.hpp"
#include "ftopipe/slicer.hpp"

namespace ftopipe {

/// Piece and claim come from the same patent.
inline constexpr int kMatchedLabel = 1;
/// Piece and claim come from different patents.
inline constexpr int kMismatchedLabel = 0;

struct TrainingPair {
    std::string desc_patent_id;
    std::string claim_patent_id;
    std::size_t piece_index = 0;
    std::string description_text;
    std::string claim_text;
    int claim_number = 0;
    int label = kMismatchedLabel;

    bool operator==(const TrainingPair&) const = default;
};

/// Patent id -> selected independent claims, ordered by id.
using ClaimSource = std::map<std::string, std::vector<Claim>>;

ClaimSource build_claim_source(std::span<const PatentDoc> docs, ClaimMode mode);

/// One matched pair per (piece, claim of the piece's own patent), in piece order.
std::vector<TrainingPair> generate_positive_pairs(std::span<const DescriptionPiece> pieces,
                                                  const ClaimSource& claims);

/// `count` mismatched pairs. Each draw picks a piece uniformly, then a claim
/// uniformly among the claims of the other patents represented in `pieces`.
/// Draw d is seeded from (seed, d), so the kernel parallelizes over draws.
std::vector<TrainingPair> generate_negative_pairs(std::span<const DescriptionPiece> pieces,
                                                  const ClaimSource& claims, std::size_t count,
                                                  std::uint64_t seed);

namespace reference {
std::vector<TrainingPair> generate_negative_pairs(std::span<const DescriptionPiece> pieces,
                                                  const ClaimSource& claims, std::size_t count,
                                                  std::uint64_t seed);
}  // namespace reference

/// Positives plus the same number of negatives, shuffled with `seed`.
std::vector<TrainingPair> build_dataset(std::span<const DescriptionPiece> pieces, const ClaimSource& claims,
                                        std::uint64_t seed);

struct PairSplit {
    std::vector<TrainingPair> train;
    std::vector<TrainingPair> validation;
};

/// Random split by pair. Both halves keep input order.
PairSplit split_validation(std::span<const TrainingPair> pairs, double fraction, std::uint64_t seed);
PairSplit split_validation_count(std::span<const TrainingPair> pairs, std::size_t count, std::uint64_t seed);

std::string to_json_line(const TrainingPair& pair);
/// Throws Error(SchemaError) on missing keys, wrong types, or a label outside {0, 1}.
TrainingPair parse_pair_record(std::string_view json_line);

void write_pairs(const std::filesystem::path& path, std::span<const TrainingPair> pairs);
std::vector<TrainingPair> read_pairs(const std::filesystem::path& path);

}  // namespace ftopipe
