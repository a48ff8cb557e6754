// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/error.hpp"

namespace ftopipe {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::NoIndependentClaim: return "NoIndependentClaim";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyDescription: return "EmptyDescription";
        case ErrorCode::InvalidBounds: return "InvalidBounds";
        case ErrorCode::MissingClaims: return "MissingClaims";
        case ErrorCode::NoNegativeSource: return "NoNegativeSource";
        case ErrorCode::InvalidSize: return "InvalidSize";
        case ErrorCode::MissingSpecial: return "MissingSpecial";
        case ErrorCode::EmptyVocab: return "EmptyVocab";
        case ErrorCode::DuplicateToken: return "DuplicateToken";
        case ErrorCode::EmptySegment: return "EmptySegment";
        case ErrorCode::MaxLenTooSmall: return "MaxLenTooSmall";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::SingleClassDataset: return "SingleClassDataset";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::MissingResponse: return "MissingResponse";
        case ErrorCode::NonFiniteLogit: return "NonFiniteLogit";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::ReferenceNotInPool: return "ReferenceNotInPool";
        case ErrorCode::OverlapDetected: return "OverlapDetected";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& detail, std::optional<std::size_t> line) {
    std::string msg{error_code_name(code)};
    msg += '(';
    if (line) {
        msg += std::to_string(*line);
        msg += ", ";
    }
    msg += '"';
    msg += detail;
    msg += "\")";
    return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail, std::optional<std::size_t> line)
    : std::runtime_error(format_message(code, detail, line)),
      code_(code),
      detail_(std::move(detail)),
      line_(line) {}

}  // namespace ftopipe
