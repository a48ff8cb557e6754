// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ftopipe {

struct Claim {
    int number = 0;
    std::string text;
    bool is_independent = false;

    bool operator==(const Claim&) const = default;
};

/// One patent publication as ingested from the corpus JSON-lines file.
struct PatentDoc {
    std::string id;         // publication number, e.g. "US9659410B2"
    std::string kind_code;  // "B2", "A1", ...
    std::string language;   // ISO-639-1
    std::vector<std::string> classifications;
    std::string abstract;
    std::string description;
    std::vector<Claim> claims;

    bool operator==(const PatentDoc&) const = default;
};

enum class ClaimMode { FirstOnly, All };

std::string_view claim_mode_name(ClaimMode mode);
/// Accepts "first_only" and "all".
ClaimMode parse_claim_mode(std::string_view name);

struct LoadResult {
    std::vector<PatentDoc> docs;
    std::size_t total_records = 0;  // non-blank lines seen
    std::size_t skipped = 0;
    /// (line number, reason) for each skipped record.
    std::vector<std::pair<std::size_t, std::string>> skipped_records;
};

/// Fallback for records without an explicit is_independent flag: a claim that
/// refers back to another claim ("according to claim 1", "of claim 3") is
/// dependent.
bool refers_to_other_claim(std::string_view claim_text);

/// Parses and validates one corpus record. Throws Error(MalformedRecord)
/// carrying the reason; the caller attaches the line number.
PatentDoc parse_patent_record(std::string_view json_line);

std::string to_json_line(const PatentDoc& doc);

/// Records are parsed and validated in parallel; output is in file order.
/// Strict mode aborts on the first malformed record. Duplicate ids abort in
/// both modes.
LoadResult load_corpus(const std::filesystem::path& path, bool strict);
LoadResult load_corpus(std::span<const std::string> lines, bool strict);

void write_corpus(const std::filesystem::path& path, std::span<const PatentDoc> docs);

struct CorpusFilter {
    std::string class_prefix;         // "" matches every doc
    std::set<std::string> languages;  // empty = any language
    std::set<std::string> kinds;      // empty = any kind code
};

std::vector<PatentDoc> filter_corpus(std::span<const PatentDoc> docs, const CorpusFilter& filter);

struct CorpusSplit {
    std::vector<PatentDoc> train;
    std::vector<PatentDoc> search;
};

/// Seeded random partition; round(fraction * n) docs go to the search side.
/// Both halves keep input order.
CorpusSplit split_disjoint(std::span<const PatentDoc> docs, double search_fraction, std::uint64_t seed);
CorpusSplit split_disjoint(std::span<const PatentDoc> docs, const std::set<std::string>& search_ids);

std::vector<Claim> independent_claims(const PatentDoc& doc, ClaimMode mode);

}  // namespace ftopipe
