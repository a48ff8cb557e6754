// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ftopipe {

bool is_ascii_space(char c) noexcept;
bool is_ascii_punct(char c) noexcept;

/// Maximal runs of non-whitespace bytes. Views point into `text`.
std::vector<std::string_view> split_words(std::string_view text);

std::size_t count_words(std::string_view text);

std::string join_words(const std::vector<std::string_view>& words, std::size_t begin, std::size_t end);

/// BERT-style basic tokenization: drop control characters, lowercase ASCII,
/// split on whitespace, and emit each ASCII punctuation character as its own
/// token. Non-ASCII bytes are kept as part of words.
std::vector<std::string> basic_tokenize(std::string_view text);

}  // namespace ftopipe
