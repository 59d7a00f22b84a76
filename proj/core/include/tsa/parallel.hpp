// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace tsa {

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; if any call throws, the exception of the lowest failing
/// index is rethrown after all workers finish. threads <= 1 runs inline.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace tsa
