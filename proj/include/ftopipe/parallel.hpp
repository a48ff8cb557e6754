// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

namespace ftopipe {

/// Worker count for the OpenMP kernels. Kernels write into pre-sized,
/// index-addressed slots, so this never changes results.
void set_thread_count(int threads);
int thread_count();

/// --threads wins, then FTOPIPE_THREADS, then the OpenMP default.
int resolve_thread_count(std::optional<int> flag);

}  // namespace ftopipe
