// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ftopipe/corpus.hpp"
#include "ftopipe/rng.hpp"

namespace ftopipe::testing {

inline PatentDoc make_doc(std::string id, std::string description, std::vector<Claim> claims,
                          std::vector<std::string> classes = {"G06T1/60"}) {
    PatentDoc doc;
    doc.id = std::move(id);
    doc.kind_code = "B2";
    doc.language = "en";
    doc.classifications = std::move(classes);
    doc.abstract = "abstract of " + doc.id;
    doc.description = std::move(description);
    doc.claims = std::move(claims);
    return doc;
}

inline std::string numbered_words(std::size_t n, const std::string& stem = "w") {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += stem + std::to_string(i);
    }
    return out;
}

/// Random text of `n` words over a small alphabet of lowercase pseudo-words,
/// separated by random whitespace runs.
inline std::string random_text(Rng& rng, std::size_t n, std::size_t vocab = 50) {
    static const char* const gaps[] = {" ", "  ", "\t", "\n", " \n "};
    std::string out;
    if (rng.below(4) == 0) out += gaps[rng.below(5)];
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += gaps[rng.below(5)];
        out += "tok" + std::to_string(rng.below(vocab));
    }
    if (rng.below(4) == 0) out += gaps[rng.below(5)];
    return out;
}

/// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
  public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("ftopipe_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

}  // namespace ftopipe::testing
