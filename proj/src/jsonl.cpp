// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "ftopipe/error.hpp"

namespace ftopipe {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorCode::FileNotFound, path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

}  // namespace

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::string read_text(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    auto out = open_output(path);
    for (const auto& line : lines) {
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
        out.put('\n');
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace ftopipe
