// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "ftopipe/error.hpp"
#include "ftopipe/slicer.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace ftopipe {
namespace {

using testing::make_doc;
using testing::oracle_join;
using testing::oracle_words;

// Checks bounds and reconstruction against words recounted by the oracle.
void expect_valid_slicing(const PatentDoc& doc, const std::vector<DescriptionPiece>& pieces, SliceBounds b) {
    const auto words = oracle_words(doc.description);
    ASSERT_FALSE(pieces.empty());
    std::vector<std::string> rejoined;
    std::size_t total = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& p = pieces[k];
        EXPECT_EQ(p.patent_id, doc.id);
        EXPECT_EQ(p.piece_index, k);
        const auto pw = oracle_words(p.text);
        EXPECT_EQ(pw.size(), p.word_count);
        EXPECT_EQ(oracle_join(pw), p.text) << "piece text must be single-space joined";
        rejoined.insert(rejoined.end(), pw.begin(), pw.end());
        total += p.word_count;
        if (pieces.size() == 1 && words.size() < b.min_words) continue;
        if (k + 1 < pieces.size()) {
            EXPECT_GE(p.word_count, b.min_words);
            EXPECT_LE(p.word_count, b.max_words);
        } else {
            EXPECT_GE(p.word_count, b.min_words);
            EXPECT_LE(p.word_count, b.max_words + b.min_words - 1);
        }
    }
    EXPECT_EQ(total, words.size());
    EXPECT_EQ(rejoined, words);
}

TEST(Slicer, FourHundredFiftyWords) {
    const auto doc = make_doc("US1", testing::numbered_words(450), {{1, "c", true}});
    const auto pieces = slice_description(doc, {100, 200}, 42);
    expect_valid_slicing(doc, pieces, {100, 200});
    EXPECT_GE(pieces.size(), 2u);
    EXPECT_LE(pieces.size(), 4u);
}

TEST(Slicer, ShortDescriptionIsSolePiece) {
    const auto doc = make_doc("US1", testing::numbered_words(80), {{1, "c", true}});
    const auto pieces = slice_description(doc, {100, 200}, 1);
    ASSERT_EQ(pieces.size(), 1u);
    EXPECT_EQ(pieces[0].word_count, 80u);
}

TEST(Slicer, ExactlyMinWordsIsOnePiece) {
    const auto doc = make_doc("US1", testing::numbered_words(100), {{1, "c", true}});
    const auto pieces = slice_description(doc, {100, 200}, 1);
    ASSERT_EQ(pieces.size(), 1u);
    EXPECT_EQ(pieces[0].word_count, 100u);
}

TEST(Slicer, Errors) {
    auto doc = make_doc("US9", "", {{1, "c", true}});
    try {
        slice_description(doc, {100, 200}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyDescription);
        EXPECT_EQ(e.detail(), "US9");
    }
    doc.description = " \n\t ";
    EXPECT_THROW(slice_description(doc, {100, 200}, 1), Error);
    doc.description = "a b c";
    try {
        slice_description(doc, {0, 10}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidBounds);
    }
    try {
        slice_description(doc, {20, 10}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidBounds);
    }
}

TEST(Slicer, FixedLengthWhenBoundsEqual) {
    const auto doc = make_doc("US1", testing::numbered_words(95), {{1, "c", true}});
    const auto pieces = slice_description(doc, {10, 10}, 3);
    ASSERT_EQ(pieces.size(), 9u);
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) EXPECT_EQ(pieces[k].word_count, 10u);
    EXPECT_EQ(pieces.back().word_count, 15u);
}

TEST(Slicer, PartitionAndBoundProperty) {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t lo = 1 + rng.below(40);
        const std::size_t hi = lo + rng.below(40);
        const std::size_t n = 1 + rng.below(600);
        const auto doc = make_doc("D" + std::to_string(trial), testing::random_text(rng, n), {{1, "c", true}});
        const auto pieces = slice_description(doc, {lo, hi}, rng.next());
        SCOPED_TRACE("trial " + std::to_string(trial));
        expect_valid_slicing(doc, pieces, {lo, hi});
    }
}

TEST(Slicer, DeterministicPerDocumentRegardlessOfCorpusOrder) {
    std::vector<PatentDoc> docs;
    for (int i = 0; i < 6; ++i) docs.push_back(make_doc("P" + std::to_string(i), testing::numbered_words(500 + 37 * i), {{1, "c", true}}));
    const auto forward = slice_corpus(docs, {100, 200}, 5);
    std::vector<PatentDoc> reversed(docs.rbegin(), docs.rend());
    const auto backward = slice_corpus(reversed, {100, 200}, 5);
    for (const auto& p : forward) {
        const auto it = std::find(backward.begin(), backward.end(), p);
        EXPECT_NE(it, backward.end());
    }
    EXPECT_EQ(forward.size(), backward.size());
    EXPECT_EQ(slice_corpus(docs, {100, 200}, 5), forward);
    EXPECT_NE(slice_corpus(docs, {100, 200}, 6), forward);
}

TEST(Slicer, CorpusOutputGroupedInInputOrder) {
    std::vector<PatentDoc> docs = {make_doc("B", testing::numbered_words(300), {{1, "c", true}}),
                                   make_doc("A", testing::numbered_words(250), {{1, "c", true}})};
    const auto pieces = slice_corpus(docs, {100, 200}, 1);
    ASSERT_GE(pieces.size(), 2u);
    EXPECT_EQ(pieces.front().patent_id, "B");
    EXPECT_EQ(pieces.back().patent_id, "A");
}

TEST(Slicer, JsonLine) {
    const DescriptionPiece p{"US1", 2, "a \"b\"", 2};
    EXPECT_EQ(to_json_line(p), R"({"patent_id":"US1","piece_index":2,"text":"a \"b\""})");
}

}  // namespace
}  // namespace ftopipe
