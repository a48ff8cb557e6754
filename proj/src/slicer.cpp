// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/slicer.hpp"

#include "ftopipe/error.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/rng.hpp"
#include "ftopipe/text.hpp"
#include "json.hpp"

namespace ftopipe {

std::vector<DescriptionPiece> slice_description(const PatentDoc& doc, SliceBounds bounds, std::uint64_t seed) {
    if (bounds.min_words == 0 || bounds.min_words > bounds.max_words) {
        throw Error(ErrorCode::InvalidBounds, "need 0 < min_words <= max_words, got [" +
                                                  std::to_string(bounds.min_words) + ", " +
                                                  std::to_string(bounds.max_words) + "]");
    }
    const auto words = split_words(doc.description);
    if (words.empty()) throw Error(ErrorCode::EmptyDescription, doc.id);

    Rng rng(derive_seed(seed, doc.id));
    std::vector<DescriptionPiece> pieces;
    std::size_t begin = 0;
    while (begin < words.size()) {
        const std::size_t remaining = words.size() - begin;
        std::size_t len = remaining;
        if (remaining >= bounds.min_words) {
            const auto drawn = static_cast<std::size_t>(rng.uniform_int(
                static_cast<std::int64_t>(bounds.min_words), static_cast<std::int64_t>(bounds.max_words)));
            len = std::min(drawn, remaining);
            // Absorb a sub-minimum tail instead of emitting or dropping it.
            if (remaining - len < bounds.min_words) len = remaining;
        }
        const std::size_t end = begin + len;
        pieces.push_back(DescriptionPiece{doc.id, pieces.size(), join_words(words, begin, end), len});
        begin = end;
    }
    return pieces;
}

namespace {

std::vector<DescriptionPiece> flatten(std::vector<std::vector<DescriptionPiece>>& per_doc) {
    std::size_t total = 0;
    for (const auto& v : per_doc) total += v.size();
    std::vector<DescriptionPiece> out;
    out.reserve(total);
    for (auto& v : per_doc) {
        for (auto& p : v) out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::vector<DescriptionPiece> slice_corpus(std::span<const PatentDoc> docs, SliceBounds bounds, std::uint64_t seed) {
    std::vector<std::vector<DescriptionPiece>> per_doc(docs.size());
    std::vector<std::exception_ptr> errors(docs.size());
    const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            per_doc[k] = slice_description(docs[k], bounds, seed);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return flatten(per_doc);
}

namespace reference {

std::vector<DescriptionPiece> slice_corpus(std::span<const PatentDoc> docs, SliceBounds bounds, std::uint64_t seed) {
    std::vector<DescriptionPiece> out;
    for (const auto& doc : docs) {
        for (auto& piece : slice_description(doc, bounds, seed)) out.push_back(std::move(piece));
    }
    return out;
}

}  // namespace reference

std::string to_json_line(const DescriptionPiece& piece) {
    nlohmann::ordered_json obj;
    obj["patent_id"] = piece.patent_id;
    obj["piece_index"] = piece.piece_index;
    obj["text"] = piece.text;
    return obj.dump();
}

void write_pieces(const std::filesystem::path& path, std::span<const DescriptionPiece> pieces) {
    std::vector<std::string> lines;
    lines.reserve(pieces.size());
    for (const auto& p : pieces) lines.push_back(to_json_line(p));
    write_lines(path, lines);
}

}  // namespace ftopipe
