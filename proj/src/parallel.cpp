// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace ftopipe {

void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

int resolve_thread_count(std::optional<int> flag) {
    if (flag && *flag > 0) return *flag;
    if (const char* env = std::getenv("FTOPIPE_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

}  // namespace ftopipe
