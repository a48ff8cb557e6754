// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <unordered_set>
#include <variant>

#include "ftopipe/error.hpp"
#include "ftopipe/jsonl.hpp"
#include "ftopipe/rng.hpp"
#include "json.hpp"

namespace ftopipe {

using nlohmann::json;

std::string_view claim_mode_name(ClaimMode mode) {
    return mode == ClaimMode::FirstOnly ? "first_only" : "all";
}

ClaimMode parse_claim_mode(std::string_view name) {
    if (name == "first_only") return ClaimMode::FirstOnly;
    if (name == "all") return ClaimMode::All;
    throw Error(ErrorCode::InvalidArgument, "unknown claim mode " + std::string(name));
}

bool refers_to_other_claim(std::string_view claim_text) {
    static const std::regex back_reference(
        R"(\b(according to|of|in|to|by|per)\s+(any\s+(one\s+)?of\s+)?claims?\s+\d+)",
        std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    return std::regex_search(claim_text.begin(), claim_text.end(), back_reference);
}

namespace {

[[noreturn]] void malformed(std::string reason) {
    throw Error(ErrorCode::MalformedRecord, std::move(reason));
}

const json& require(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) malformed(std::string("missing field ") + key);
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_string()) malformed(std::string("field ") + key + " must be a string");
    return v.get<std::string>();
}

Claim parse_claim(const json& item, std::size_t position) {
    const std::string where = "claims[" + std::to_string(position) + "]";
    if (!item.is_object()) malformed(where + " must be an object");
    const auto number = item.find("number");
    if (number == item.end()) malformed("missing field " + where + ".number");
    if (!number->is_number_integer()) malformed(where + ".number must be an integer");
    const auto text = item.find("text");
    if (text == item.end()) malformed("missing field " + where + ".text");
    if (!text->is_string()) malformed(where + ".text must be a string");

    Claim claim;
    const auto n = number->get<std::int64_t>();
    if (n <= 0 || n > std::numeric_limits<int>::max()) malformed(where + ".number must be positive");
    claim.number = static_cast<int>(n);
    claim.text = text->get<std::string>();
    if (claim.text.empty()) malformed(where + ".text is empty");

    const auto flag = item.find("is_independent");
    if (flag == item.end() || flag->is_null()) {
        claim.is_independent = !refers_to_other_claim(claim.text);
    } else if (flag->is_boolean()) {
        claim.is_independent = flag->get<bool>();
    } else {
        malformed(where + ".is_independent must be a boolean");
    }
    return claim;
}

}  // namespace

PatentDoc parse_patent_record(std::string_view json_line) {
    const json obj = json::parse(json_line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) malformed("invalid JSON");
    if (!obj.is_object()) malformed("record is not a JSON object");

    PatentDoc doc;
    doc.id = require_string(obj, "id");
    if (doc.id.empty()) malformed("empty id");
    doc.kind_code = require_string(obj, "kind_code");
    doc.language = require_string(obj, "language");

    const json& classes = require(obj, "classifications");
    if (!classes.is_array()) malformed("field classifications must be an array");
    for (const auto& c : classes) {
        if (!c.is_string()) malformed("classifications must contain strings");
        doc.classifications.push_back(c.get<std::string>());
    }

    doc.abstract = require_string(obj, "abstract");
    doc.description = require_string(obj, "description");

    const json& claims = require(obj, "claims");
    if (!claims.is_array()) malformed("field claims must be an array");
    if (claims.empty()) malformed("claims list is empty");
    for (std::size_t i = 0; i < claims.size(); ++i) {
        Claim claim = parse_claim(claims[i], i);
        if (!doc.claims.empty() && claim.number <= doc.claims.back().number) {
            malformed("claim numbers not strictly increasing");
        }
        doc.claims.push_back(std::move(claim));
    }
    return doc;
}

std::string to_json_line(const PatentDoc& doc) {
    nlohmann::ordered_json obj;
    obj["id"] = doc.id;
    obj["kind_code"] = doc.kind_code;
    obj["language"] = doc.language;
    obj["classifications"] = doc.classifications;
    obj["abstract"] = doc.abstract;
    obj["description"] = doc.description;
    auto claims = nlohmann::ordered_json::array();
    for (const auto& c : doc.claims) {
        claims.push_back({{"number", c.number}, {"text", c.text}, {"is_independent", c.is_independent}});
    }
    obj["claims"] = std::move(claims);
    return obj.dump();
}

LoadResult load_corpus(std::span<const std::string> lines, bool strict) {
    using Parsed = std::variant<std::monostate, PatentDoc, std::string>;
    std::vector<Parsed> parsed(lines.size());

    const auto n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::string& line = lines[static_cast<std::size_t>(i)];
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            parsed[static_cast<std::size_t>(i)] = parse_patent_record(line);
        } catch (const Error& e) {
            parsed[static_cast<std::size_t>(i)] = e.detail();
        }
    }

    LoadResult result;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        auto& slot = parsed[i];
        if (std::holds_alternative<std::monostate>(slot)) continue;
        ++result.total_records;
        if (auto* reason = std::get_if<std::string>(&slot)) {
            if (strict) throw Error(ErrorCode::MalformedRecord, *reason, i + 1);
            ++result.skipped;
            result.skipped_records.emplace_back(i + 1, std::move(*reason));
            continue;
        }
        auto& doc = std::get<PatentDoc>(slot);
        if (!seen.insert(doc.id).second) throw Error(ErrorCode::DuplicateId, doc.id, i + 1);
        result.docs.push_back(std::move(doc));
    }
    return result;
}

LoadResult load_corpus(const std::filesystem::path& path, bool strict) {
    const auto lines = read_lines(path);
    return load_corpus(std::span<const std::string>(lines), strict);
}

void write_corpus(const std::filesystem::path& path, std::span<const PatentDoc> docs) {
    std::vector<std::string> lines;
    lines.reserve(docs.size());
    for (const auto& doc : docs) lines.push_back(to_json_line(doc));
    write_lines(path, lines);
}

std::vector<PatentDoc> filter_corpus(std::span<const PatentDoc> docs, const CorpusFilter& filter) {
    std::vector<PatentDoc> out;
    for (const auto& doc : docs) {
        const bool class_ok = std::any_of(doc.classifications.begin(), doc.classifications.end(),
                                          [&](const std::string& c) { return c.starts_with(filter.class_prefix); });
        if (!class_ok) continue;
        if (!filter.languages.empty() && !filter.languages.contains(doc.language)) continue;
        if (!filter.kinds.empty() && !filter.kinds.contains(doc.kind_code)) continue;
        out.push_back(doc);
    }
    return out;
}

namespace {

CorpusSplit partition(std::span<const PatentDoc> docs, const std::vector<bool>& in_search) {
    CorpusSplit split;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        (in_search[i] ? split.search : split.train).push_back(docs[i]);
    }
    return split;
}

}  // namespace

CorpusSplit split_disjoint(std::span<const PatentDoc> docs, double search_fraction, std::uint64_t seed) {
    if (!(search_fraction > 0.0 && search_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "search fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "split_disjoint"));
    rng.shuffle(std::span<std::size_t>(order));

    const auto n_search = static_cast<std::size_t>(std::llround(search_fraction * static_cast<double>(docs.size())));
    std::vector<bool> in_search(docs.size(), false);
    for (std::size_t i = 0; i < n_search; ++i) in_search[order[i]] = true;
    return partition(docs, in_search);
}

CorpusSplit split_disjoint(std::span<const PatentDoc> docs, const std::set<std::string>& search_ids) {
    std::set<std::string> found;
    std::vector<bool> in_search(docs.size(), false);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (search_ids.contains(docs[i].id)) {
            in_search[i] = true;
            found.insert(docs[i].id);
        }
    }
    for (const auto& id : search_ids) {
        if (!found.contains(id)) throw Error(ErrorCode::UnknownId, id);
    }
    return partition(docs, in_search);
}

std::vector<Claim> independent_claims(const PatentDoc& doc, ClaimMode mode) {
    std::vector<Claim> out;
    for (const auto& claim : doc.claims) {
        if (!claim.is_independent) continue;
        out.push_back(claim);
    }
    if (out.empty()) throw Error(ErrorCode::NoIndependentClaim, doc.id);
    std::stable_sort(out.begin(), out.end(), [](const Claim& a, const Claim& b) { return a.number < b.number; });
    if (mode == ClaimMode::FirstOnly) out.resize(1);
    return out;
}

}  // namespace ftopipe
