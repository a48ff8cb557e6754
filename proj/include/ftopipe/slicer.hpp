// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ftopipe/corpus.hpp"

namespace ftopipe {

struct DescriptionPiece {
    std::string patent_id;
    std::size_t piece_index = 0;
    std::string text;  // words joined by single spaces
    std::size_t word_count = 0;

    bool operator==(const DescriptionPiece&) const = default;
};

struct SliceBounds {
    std::size_t min_words = 100;
    std::size_t max_words = 200;
};

/// Cuts a description into consecutive word runs whose lengths are drawn
/// uniformly from [min_words, max_words]. The generator is seeded from
/// (seed, patent id). A tail shorter than min_words is merged into the
/// previous piece, so the final piece can reach max_words + min_words - 1.
/// A description shorter than min_words becomes a single piece.
std::vector<DescriptionPiece> slice_description(const PatentDoc& doc, SliceBounds bounds, std::uint64_t seed);

/// Slices every doc, OpenMP-parallel over documents; output is grouped by doc
/// in input order.
std::vector<DescriptionPiece> slice_corpus(std::span<const PatentDoc> docs, SliceBounds bounds, std::uint64_t seed);

namespace reference {
std::vector<DescriptionPiece> slice_corpus(std::span<const PatentDoc> docs, SliceBounds bounds, std::uint64_t seed);
}  // namespace reference

std::string to_json_line(const DescriptionPiece& piece);
void write_pieces(const std::filesystem::path& path, std::span<const DescriptionPiece> pieces);

}  // namespace ftopipe
