// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "ftopipe/encoder.hpp"
#include "ftopipe/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace ftopipe {
namespace {

Vocabulary tiny_vocab() {
    return Vocabulary::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "image", "cache", "render"});
}

std::vector<std::string> letters_vocab_tokens() {
    std::vector<std::string> t = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
    for (char c = 'a'; c <= 'z'; ++c) t.push_back(std::string(1, c));
    for (char c = 'a'; c <= 'z'; ++c) t.push_back("##" + std::string(1, c));
    return t;
}

TEST(Vocabulary, LoadFromFile) {
    testing::TempDir dir;
    {
        std::ofstream f(dir / "vocab.txt");
        f << "[PAD]\n[UNK]\n[CLS]\n[SEP]\nimage\ncache\nrender\n##s\n";
    }
    const auto v = Vocabulary::load(dir / "vocab.txt");
    EXPECT_EQ(v.size(), 8u);
    EXPECT_EQ(v.pad_id(), 0);
    EXPECT_EQ(v.sep_id(), 3);
    EXPECT_EQ(*v.find("##s"), 7);
    EXPECT_FALSE(v.find("nope").has_value());
}

TEST(Vocabulary, Errors) {
    try {
        Vocabulary::from_tokens({"[PAD]", "[UNK]", "[SEP]", "x"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingSpecial);
        EXPECT_EQ(e.detail(), "[CLS]");
    }
    try {
        Vocabulary::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "x", "x"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateToken);
        EXPECT_EQ(e.line(), 6u);
    }
    try {
        Vocabulary::from_tokens({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyVocab);
    }
    EXPECT_THROW(Vocabulary::load("/nonexistent/vocab.txt"), Error);
}

TEST(WordPiece, GreedyLongestMatch) {
    const auto v = Vocabulary::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "un", "##aff", "##able", "##a", "u"});
    EXPECT_EQ(wordpiece_split("unaffable", v), (std::vector<std::string>{"un", "##aff", "##able"}));
    EXPECT_EQ(wordpiece_split("xyz", v), (std::vector<std::string>{"[UNK]"}));
    EXPECT_EQ(wordpiece_split("unq", v), (std::vector<std::string>{"[UNK]"}));
}

TEST(WordPiece, LowercasesAndSplitsPunctuation) {
    const auto v = Vocabulary::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "image", ","});
    EXPECT_EQ(wordpiece_tokenize("Image", v), (std::vector<std::string>{"image"}));
    EXPECT_EQ(wordpiece_tokenize("IMAGE, image", v), (std::vector<std::string>{"image", ",", "image"}));
}

TEST(WordPiece, OverlongWordIsUnknown) {
    const auto v = Vocabulary::from_tokens(letters_vocab_tokens());
    EXPECT_EQ(wordpiece_split(std::string(100, 'a'), v).size(), 100u);
    EXPECT_EQ(wordpiece_split(std::string(101, 'a'), v), (std::vector<std::string>{"[UNK]"}));
}

TEST(WordPiece, MatchesOracleOnRandomWords) {
    std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
    Rng rng(8);
    std::set<std::string> set;
    auto rand_piece = [&](std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng.below(4));
        return s;
    };
    while (set.size() < 30) {
        auto p = rand_piece(1 + rng.below(3));
        if (rng.below(2)) p = "##" + p;
        set.insert(p);
    }
    tokens.insert(tokens.end(), set.begin(), set.end());
    set.insert("[UNK]");
    const auto v = Vocabulary::from_tokens(tokens);
    for (int i = 0; i < 500; ++i) {
        const auto w = rand_piece(1 + rng.below(8));
        EXPECT_EQ(wordpiece_split(w, v), testing::oracle_wordpiece(w, set)) << w;
    }
}

TEST(Encode, LayoutExample) {
    const auto seq = encode_pair("image cache", "render cache", tiny_vocab(), 10);
    EXPECT_EQ(seq.token_ids, (std::vector<TokenId>{2, 4, 5, 3, 6, 5, 3, 0, 0, 0}));
    EXPECT_EQ(seq.segment_ids, (std::vector<std::int8_t>{0, 0, 0, 0, 1, 1, 1, 0, 0, 0}));
    EXPECT_EQ(seq.attention_mask, (std::vector<std::int8_t>{1, 1, 1, 1, 1, 1, 1, 0, 0, 0}));
    EXPECT_FALSE(seq.truncated);
}

TEST(Encode, LongestFirstTrimsDescription) {
    const auto seq = encode_pair("image image image image image image", "cache cache", tiny_vocab(), 8);
    EXPECT_EQ(seq.token_ids, (std::vector<TokenId>{2, 4, 4, 4, 3, 5, 5, 3}));
    EXPECT_EQ(seq.attention_mask, std::vector<std::int8_t>(8, 1));
    EXPECT_TRUE(seq.truncated);
}

TEST(Encode, EqualLongSegments) {
    EXPECT_EQ(truncate_longest_first(300, 300, 497), (std::pair<std::size_t, std::size_t>{249, 248}));
    std::string a, b;
    for (int i = 0; i < 300; ++i) {
        a += "image ";
        b += "cache ";
    }
    const auto seq = encode_pair(a, b, tiny_vocab(), 500);
    const auto [da, db] = decode_segments(seq, tiny_vocab());
    EXPECT_EQ(da.size(), 249u);
    EXPECT_EQ(db.size(), 248u);
}

TEST(Encode, TruncationMatchesClosedForm) {
    for (std::size_t a = 1; a < 40; ++a)
        for (std::size_t b = 1; b < 40; ++b)
            for (std::size_t budget = 2; budget < 60; ++budget)
                ASSERT_EQ(truncate_longest_first(a, b, budget), testing::oracle_truncation(a, b, budget))
                    << a << " " << b << " " << budget;
}

TEST(Encode, Errors) {
    try {
        encode_pair("image", "image", tiny_vocab(), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MaxLenTooSmall);
    }
    try {
        encode_pair("", "image", tiny_vocab(), 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptySegment);
    }
    EXPECT_THROW(encode_pair("image", " ", tiny_vocab(), 10), Error);
    EXPECT_NO_THROW(encode_pair("image", "image", tiny_vocab(), 5));
}

TEST(Encode, UnknownWordsBecomeUnk) {
    const auto seq = encode_pair("zebra", "image", tiny_vocab(), 6);
    EXPECT_EQ(seq.token_ids, (std::vector<TokenId>{2, 1, 3, 4, 3, 0}));
}

// Layout property over random pairs, verified field by field.
TEST(Encode, LayoutProperty) {
    const auto v = Vocabulary::from_tokens(letters_vocab_tokens());
    Rng rng(12);
    auto rand_text = [&](std::size_t words) {
        std::string s;
        for (std::size_t i = 0; i < words; ++i) {
            for (std::uint64_t c = 0, n = 1 + rng.below(3); c < n; ++c) s += static_cast<char>('a' + rng.below(26));
            s += ' ';
        }
        return s;
    };
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t max_len = 5 + rng.below(60);
        const auto a = rand_text(1 + rng.below(40));
        const auto b = rand_text(1 + rng.below(40));
        const auto seq = encode_pair(a, b, v, max_len);
        const auto ta = wordpiece_tokenize(a, v).size();
        const auto tb = wordpiece_tokenize(b, v).size();
        const auto [la, lb] = testing::oracle_truncation(ta, tb, max_len - 3);
        ASSERT_EQ(seq.token_ids.size(), max_len);
        ASSERT_EQ(seq.segment_ids.size(), max_len);
        ASSERT_EQ(seq.attention_mask.size(), max_len);
        EXPECT_EQ(seq.truncated, la + lb < ta + tb);
        EXPECT_EQ(seq.token_ids[0], v.cls_id());
        EXPECT_EQ(seq.token_ids[la + 1], v.sep_id());
        EXPECT_EQ(seq.token_ids[la + lb + 2], v.sep_id());
        for (std::size_t i = 0; i < max_len; ++i) {
            const bool content = i < la + lb + 3;
            EXPECT_EQ(seq.attention_mask[i], content ? 1 : 0);
            EXPECT_EQ(seq.segment_ids[i], (i >= la + 2 && content) ? 1 : 0);
            if (!content) EXPECT_EQ(seq.token_ids[i], v.pad_id());
        }
        EXPECT_GE(la, 1u);
        EXPECT_GE(lb, 1u);
    }
}

TEST(Encode, BatchCarriesLabelsAndJson) {
    const std::vector<TrainingPair> pairs = {{"A", "A", 0, "image cache", "render", 1, 1},
                                             {"A", "B", 0, "render", "cache", 1, 0}};
    const auto batch = encode_batch(pairs, tiny_vocab(), 8);
    ASSERT_EQ(batch.size(), 2u);
    EXPECT_EQ(batch[0].label, 1);
    EXPECT_EQ(batch[1].label, 0);
    EXPECT_EQ(to_json_line(batch[1]),
              R"({"token_ids":[2,6,3,5,3,0,0,0],"segment_ids":[0,0,0,1,1,0,0,0],"attention_mask":[1,1,1,1,1,0,0,0],"label":0})");
}

}  // namespace
}  // namespace ftopipe
