// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ftopipe {

/// Every line of a UTF-8 text file with trailing '\r' removed. A final empty
/// line after the last newline is not reported.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

/// Writes each entry followed by '\n'. Parent directories must exist.
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ftopipe
