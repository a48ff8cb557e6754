// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ftopipe/pairgen.hpp"

namespace ftopipe {

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kContinuationPrefix = "##";
inline constexpr std::size_t kDefaultMaxLen = 500;

using TokenId = std::int32_t;

/// Immutable token <-> id table. Ids are line numbers of the vocab file.
class Vocabulary {
  public:
    /// One token per line. Throws FileNotFound, EmptyVocab, DuplicateToken,
    /// MissingSpecial.
    static Vocabulary load(const std::filesystem::path& path);
    static Vocabulary from_tokens(std::vector<std::string> tokens);

    std::optional<TokenId> find(std::string_view token) const;
    bool contains(std::string_view token) const { return find(token).has_value(); }
    const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return tokens_.size(); }

    TokenId pad_id() const { return pad_; }
    TokenId unk_id() const { return unk_; }
    TokenId cls_id() const { return cls_; }
    TokenId sep_id() const { return sep_; }

  private:
    Vocabulary() = default;

    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> ids_;
    TokenId pad_ = 0;
    TokenId unk_ = 0;
    TokenId cls_ = 0;
    TokenId sep_ = 0;
};

/// Greedy longest-match-first subword split of a single word. Returns
/// {"[UNK]"} if some suffix has no match or the word exceeds
/// `max_chars_per_word` code points.
std::vector<std::string> wordpiece_split(std::string_view word, const Vocabulary& vocab,
                                         std::size_t max_chars_per_word = 100);

/// Basic tokenization followed by WordPiece on each token.
std::vector<std::string> wordpiece_tokenize(std::string_view text, const Vocabulary& vocab);

struct EncodedSequence {
    std::vector<TokenId> token_ids;
    std::vector<std::int8_t> segment_ids;
    std::vector<std::int8_t> attention_mask;
    std::optional<int> label;
    bool truncated = false;

    bool operator==(const EncodedSequence&) const = default;
};

/// Lengths after longest-first truncation to `budget` content tokens: the
/// longer segment loses its last token until the pair fits; on a tie the
/// second segment is cut.
std::pair<std::size_t, std::size_t> truncate_longest_first(std::size_t first, std::size_t second,
                                                           std::size_t budget);

/// [CLS] desc [SEP] claim [SEP] [PAD]... to exactly max_len ids.
/// Throws MaxLenTooSmall (max_len < 5) and EmptySegment.
EncodedSequence encode_pair(std::string_view desc_text, std::string_view claim_text, const Vocabulary& vocab,
                            std::size_t max_len = kDefaultMaxLen);

/// Encodes training pairs in parallel; labels are carried through.
std::vector<EncodedSequence> encode_batch(std::span<const TrainingPair> pairs, const Vocabulary& vocab,
                                          std::size_t max_len = kDefaultMaxLen);

namespace reference {
std::vector<EncodedSequence> encode_batch(std::span<const TrainingPair> pairs, const Vocabulary& vocab,
                                          std::size_t max_len = kDefaultMaxLen);
}  // namespace reference

/// Content tokens of the two segments (specials and padding removed).
std::pair<std::vector<std::string>, std::vector<std::string>> decode_segments(const EncodedSequence& seq,
                                                                               const Vocabulary& vocab);

std::string to_json_line(const EncodedSequence& seq);

}  // namespace ftopipe
