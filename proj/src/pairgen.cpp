// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/pairgen.hpp"

#include <cmath>
#include <numeric>

#include "ftopipe/error.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/rng.hpp"
#include "json.hpp"

namespace ftopipe {

ClaimSource build_claim_source(std::span<const PatentDoc> docs, ClaimMode mode) {
    ClaimSource source;
    for (const auto& doc : docs) source.emplace(doc.id, independent_claims(doc, mode));
    return source;
}

std::vector<TrainingPair> generate_positive_pairs(std::span<const DescriptionPiece> pieces,
                                                  const ClaimSource& claims) {
    std::vector<TrainingPair> out;
    for (const auto& piece : pieces) {
        const auto it = claims.find(piece.patent_id);
        if (it == claims.end() || it->second.empty()) throw Error(ErrorCode::MissingClaims, piece.patent_id);
        for (const auto& claim : it->second) {
            out.push_back(TrainingPair{piece.patent_id, piece.patent_id, piece.piece_index, piece.text, claim.text,
                                       claim.number, kMatchedLabel});
        }
    }
    return out;
}

namespace {

struct ClaimRef {
    const std::string* patent_id;
    const Claim* claim;
};

/// Claims eligible for negatives, grouped by patent in id order, plus the
/// contiguous block each patent occupies.
struct NegativePool {
    std::vector<ClaimRef> claims;
    std::map<std::string, std::pair<std::size_t, std::size_t>> blocks;  // id -> [begin, end)
};

NegativePool make_negative_pool(std::span<const DescriptionPiece> pieces, const ClaimSource& source) {
    std::set<std::string> in_pieces;
    for (const auto& p : pieces) in_pieces.insert(p.patent_id);

    NegativePool pool;
    for (const auto& [id, claims] : source) {
        if (!in_pieces.contains(id) || claims.empty()) continue;
        const std::size_t begin = pool.claims.size();
        for (const auto& c : claims) pool.claims.push_back(ClaimRef{&id, &c});
        pool.blocks.emplace(id, std::make_pair(begin, pool.claims.size()));
    }
    return pool;
}

void check_negative_source(const NegativePool& pool) {
    if (pool.blocks.size() < 2) {
        throw Error(ErrorCode::NoNegativeSource, "need claims from at least two patents, found " +
                                                     std::to_string(pool.blocks.size()));
    }
}

TrainingPair draw_negative(std::span<const DescriptionPiece> pieces, const NegativePool& pool, std::uint64_t seed,
                           std::size_t draw) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(draw)));
    const DescriptionPiece& piece = pieces[rng.below(pieces.size())];

    std::size_t own_begin = 0;
    std::size_t own_size = 0;
    if (const auto it = pool.blocks.find(piece.patent_id); it != pool.blocks.end()) {
        own_begin = it->second.first;
        own_size = it->second.second - it->second.first;
    }
    std::size_t idx = rng.below(pool.claims.size() - own_size);
    if (idx >= own_begin) idx += own_size;

    const ClaimRef& ref = pool.claims[idx];
    return TrainingPair{piece.patent_id,   *ref.patent_id,   piece.piece_index, piece.text,
                        ref.claim->text,   ref.claim->number, kMismatchedLabel};
}

}  // namespace

std::vector<TrainingPair> generate_negative_pairs(std::span<const DescriptionPiece> pieces,
                                                  const ClaimSource& claims, std::size_t count,
                                                  std::uint64_t seed) {
    if (count == 0) return {};
    const NegativePool pool = make_negative_pool(pieces, claims);
    check_negative_source(pool);

    std::vector<TrainingPair> out(count);
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
    for (std::int64_t d = 0; d < n; ++d) {
        out[static_cast<std::size_t>(d)] = draw_negative(pieces, pool, seed, static_cast<std::size_t>(d));
    }
    return out;
}

namespace reference {

std::vector<TrainingPair> generate_negative_pairs(std::span<const DescriptionPiece> pieces,
                                                  const ClaimSource& claims, std::size_t count,
                                                  std::uint64_t seed) {
    if (count == 0) return {};
    const NegativePool pool = make_negative_pool(pieces, claims);
    check_negative_source(pool);
    std::vector<TrainingPair> out;
    out.reserve(count);
    for (std::size_t d = 0; d < count; ++d) out.push_back(draw_negative(pieces, pool, seed, d));
    return out;
}

}  // namespace reference

std::vector<TrainingPair> build_dataset(std::span<const DescriptionPiece> pieces, const ClaimSource& claims,
                                        std::uint64_t seed) {
    std::vector<TrainingPair> pairs = generate_positive_pairs(pieces, claims);
    auto negatives = generate_negative_pairs(pieces, claims, pairs.size(), derive_seed(seed, "negatives"));
    pairs.reserve(pairs.size() + negatives.size());
    for (auto& p : negatives) pairs.push_back(std::move(p));

    Rng rng(derive_seed(seed, "shuffle"));
    rng.shuffle(std::span<TrainingPair>(pairs));
    return pairs;
}

PairSplit split_validation_count(std::span<const TrainingPair> pairs, std::size_t count, std::uint64_t seed) {
    if (count > 0 && count >= pairs.size()) {
        throw Error(ErrorCode::InvalidSize, "validation size " + std::to_string(count) + " must be below " +
                                                std::to_string(pairs.size()));
    }
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "split_validation"));
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<bool> is_validation(pairs.size(), false);
    for (std::size_t i = 0; i < count; ++i) is_validation[order[i]] = true;

    PairSplit split;
    split.train.reserve(pairs.size() - count);
    split.validation.reserve(count);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        (is_validation[i] ? split.validation : split.train).push_back(pairs[i]);
    }
    return split;
}

PairSplit split_validation(std::span<const TrainingPair> pairs, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw Error(ErrorCode::InvalidSize, "validation fraction must lie in [0, 1)");
    }
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pairs.size())));
    return split_validation_count(pairs, count, seed);
}

std::string to_json_line(const TrainingPair& pair) {
    nlohmann::ordered_json obj;
    obj["desc_patent_id"] = pair.desc_patent_id;
    obj["claim_patent_id"] = pair.claim_patent_id;
    obj["piece_index"] = pair.piece_index;
    obj["claim_number"] = pair.claim_number;
    obj["description"] = pair.description_text;
    obj["claim"] = pair.claim_text;
    obj["label"] = pair.label;
    return obj.dump();
}

namespace {

[[noreturn]] void schema_error(std::string reason) { throw Error(ErrorCode::SchemaError, std::move(reason)); }

template <typename Pred>
const nlohmann::json& field(const nlohmann::json& obj, const char* key, Pred pred, const char* type) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(std::string("missing field ") + key);
    if (!pred(*it)) schema_error(std::string("field ") + key + " must be " + type);
    return *it;
}

}  // namespace

TrainingPair parse_pair_record(std::string_view json_line) {
    const auto obj = nlohmann::json::parse(json_line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) schema_error("invalid JSON object");
    auto is_str = [](const nlohmann::json& j) { return j.is_string(); };
    auto is_uint = [](const nlohmann::json& j) { return j.is_number_unsigned(); };
    auto is_int = [](const nlohmann::json& j) { return j.is_number_integer(); };

    TrainingPair pair;
    pair.desc_patent_id = field(obj, "desc_patent_id", is_str, "a string").get<std::string>();
    pair.claim_patent_id = field(obj, "claim_patent_id", is_str, "a string").get<std::string>();
    pair.piece_index = field(obj, "piece_index", is_uint, "a non-negative integer").get<std::size_t>();
    pair.claim_number = field(obj, "claim_number", is_int, "an integer").get<int>();
    pair.description_text = field(obj, "description", is_str, "a string").get<std::string>();
    pair.claim_text = field(obj, "claim", is_str, "a string").get<std::string>();
    const auto& label = field(obj, "label", is_int, "an integer");
    const auto value = label.get<std::int64_t>();
    if (value != kMatchedLabel && value != kMismatchedLabel) schema_error("label must be 0 or 1");
    pair.label = static_cast<int>(value);
    return pair;
}

void write_pairs(const std::filesystem::path& path, std::span<const TrainingPair> pairs) {
    std::vector<std::string> lines;
    lines.reserve(pairs.size());
    for (const auto& p : pairs) lines.push_back(to_json_line(p));
    write_lines(path, lines);
}

std::vector<TrainingPair> read_pairs(const std::filesystem::path& path) {
    std::vector<TrainingPair> pairs;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            pairs.push_back(parse_pair_record(lines[i]));
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, e.detail(), i + 1);
        }
    }
    return pairs;
}

}  // namespace ftopipe
