// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ftopipe {

enum class ErrorCode {
    FileNotFound,
    IoError,
    MalformedRecord,
    DuplicateId,
    UnknownId,
    NoIndependentClaim,
    InvalidArgument,
    EmptyDescription,
    InvalidBounds,
    MissingClaims,
    NoNegativeSource,
    InvalidSize,
    MissingSpecial,
    EmptyVocab,
    DuplicateToken,
    EmptySegment,
    MaxLenTooSmall,
    NonFiniteInput,
    SingleClassDataset,
    ProtocolError,
    MissingResponse,
    NonFiniteLogit,
    InvalidSpec,
    ReferenceNotInPool,
    OverlapDetected,
    SchemaError,
};

std::string_view error_code_name(ErrorCode code);

/// Data error raised by every pipeline stage. Usage errors (bad flags) are
/// handled by the CLI layer and never surface as ftopipe::Error.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string detail, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    /// 1-based input line for record-level errors.
    std::optional<std::size_t> line() const noexcept { return line_; }

  private:
    ErrorCode code_;
    std::string detail_;
    std::optional<std::size_t> line_;
};

}  // namespace ftopipe
