// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <span>
#include <string>

namespace ftopipe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `ftopipe` invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data errors.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ftopipe::cli
