// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/encoder.hpp"

#include "ftopipe/error.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/text.hpp"
#include "json.hpp"

namespace ftopipe {

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    return from_tokens(read_lines(path));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
    if (tokens.empty()) throw Error(ErrorCode::EmptyVocab, "vocabulary has no entries");
    Vocabulary vocab;
    vocab.ids_.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!vocab.ids_.emplace(tokens[i], static_cast<TokenId>(i)).second) {
            throw Error(ErrorCode::DuplicateToken, tokens[i], i + 1);
        }
    }
    vocab.tokens_ = std::move(tokens);

    auto special = [&](std::string_view name) {
        const auto id = vocab.find(name);
        if (!id) throw Error(ErrorCode::MissingSpecial, std::string(name));
        return *id;
    };
    vocab.pad_ = special(kPadToken);
    vocab.unk_ = special(kUnkToken);
    vocab.cls_ = special(kClsToken);
    vocab.sep_ = special(kSepToken);
    return vocab;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
    const auto it = ids_.find(std::string(token));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

namespace {

/// Byte offsets of UTF-8 code point starts, plus text.size() as sentinel.
std::vector<std::size_t> codepoint_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    offsets.reserve(text.size() + 1);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) offsets.push_back(i);
    }
    offsets.push_back(text.size());
    return offsets;
}

}  // namespace

std::vector<std::string> wordpiece_split(std::string_view word, const Vocabulary& vocab,
                                         std::size_t max_chars_per_word) {
    const auto offsets = codepoint_offsets(word);
    const std::size_t n_chars = offsets.size() - 1;
    if (n_chars == 0) return {};
    if (n_chars > max_chars_per_word) return {std::string(kUnkToken)};

    std::vector<std::string> pieces;
    std::size_t start = 0;
    std::string candidate;
    while (start < n_chars) {
        std::size_t end = n_chars;
        bool matched = false;
        while (start < end) {
            candidate.clear();
            if (start > 0) candidate += kContinuationPrefix;
            candidate += word.substr(offsets[start], offsets[end] - offsets[start]);
            if (vocab.contains(candidate)) {
                matched = true;
                break;
            }
            --end;
        }
        if (!matched) return {std::string(kUnkToken)};
        pieces.push_back(candidate);
        start = end;
    }
    return pieces;
}

std::vector<std::string> wordpiece_tokenize(std::string_view text, const Vocabulary& vocab) {
    std::vector<std::string> out;
    for (const auto& word : basic_tokenize(text)) {
        for (auto& piece : wordpiece_split(word, vocab)) out.push_back(std::move(piece));
    }
    return out;
}

std::pair<std::size_t, std::size_t> truncate_longest_first(std::size_t first, std::size_t second,
                                                           std::size_t budget) {
    while (first + second > budget) {
        if (first > second) {
            --first;
        } else {
            --second;
        }
    }
    return {first, second};
}

namespace {

std::vector<TokenId> to_ids(std::string_view text, const Vocabulary& vocab) {
    std::vector<TokenId> ids;
    for (const auto& token : wordpiece_tokenize(text, vocab)) {
        ids.push_back(vocab.find(token).value_or(vocab.unk_id()));
    }
    return ids;
}

}  // namespace

EncodedSequence encode_pair(std::string_view desc_text, std::string_view claim_text, const Vocabulary& vocab,
                            std::size_t max_len) {
    if (max_len < 5) throw Error(ErrorCode::MaxLenTooSmall, "max_len must be >= 5, got " + std::to_string(max_len));
    const auto desc = to_ids(desc_text, vocab);
    const auto claim = to_ids(claim_text, vocab);
    if (desc.empty()) throw Error(ErrorCode::EmptySegment, "description has no tokens");
    if (claim.empty()) throw Error(ErrorCode::EmptySegment, "claim has no tokens");

    const auto [n_desc, n_claim] = truncate_longest_first(desc.size(), claim.size(), max_len - 3);

    EncodedSequence seq;
    seq.truncated = n_desc < desc.size() || n_claim < claim.size();
    seq.token_ids.reserve(max_len);
    seq.segment_ids.reserve(max_len);

    seq.token_ids.push_back(vocab.cls_id());
    seq.token_ids.insert(seq.token_ids.end(), desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(n_desc));
    seq.token_ids.push_back(vocab.sep_id());
    seq.segment_ids.assign(seq.token_ids.size(), 0);
    seq.token_ids.insert(seq.token_ids.end(), claim.begin(), claim.begin() + static_cast<std::ptrdiff_t>(n_claim));
    seq.token_ids.push_back(vocab.sep_id());
    seq.segment_ids.resize(seq.token_ids.size(), 1);

    seq.attention_mask.assign(seq.token_ids.size(), 1);
    seq.token_ids.resize(max_len, vocab.pad_id());
    seq.segment_ids.resize(max_len, 0);
    seq.attention_mask.resize(max_len, 0);
    return seq;
}

std::vector<EncodedSequence> encode_batch(std::span<const TrainingPair> pairs, const Vocabulary& vocab,
                                          std::size_t max_len) {
    std::vector<EncodedSequence> out(pairs.size());
    std::vector<std::exception_ptr> errors(pairs.size());
    const auto n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = encode_pair(pairs[k].description_text, pairs[k].claim_text, vocab, max_len);
            out[k].label = pairs[k].label;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

namespace reference {

std::vector<EncodedSequence> encode_batch(std::span<const TrainingPair> pairs, const Vocabulary& vocab,
                                          std::size_t max_len) {
    std::vector<EncodedSequence> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back(encode_pair(p.description_text, p.claim_text, vocab, max_len));
        out.back().label = p.label;
    }
    return out;
}

}  // namespace reference

std::pair<std::vector<std::string>, std::vector<std::string>> decode_segments(const EncodedSequence& seq,
                                                                               const Vocabulary& vocab) {
    std::pair<std::vector<std::string>, std::vector<std::string>> out;
    std::size_t seps = 0;
    for (std::size_t i = 0; i < seq.token_ids.size(); ++i) {
        const TokenId id = seq.token_ids[i];
        if (id == vocab.pad_id()) break;
        if (id == vocab.cls_id() && i == 0) continue;
        if (id == vocab.sep_id()) {
            ++seps;
            continue;
        }
        (seps == 0 ? out.first : out.second).push_back(vocab.token(id));
    }
    return out;
}

std::string to_json_line(const EncodedSequence& seq) {
    nlohmann::ordered_json obj;
    obj["token_ids"] = seq.token_ids;
    obj["segment_ids"] = seq.segment_ids;
    obj["attention_mask"] = seq.attention_mask;
    obj["label"] = seq.label ? nlohmann::ordered_json(*seq.label) : nlohmann::ordered_json(nullptr);
    return obj.dump();
}

}  // namespace ftopipe
