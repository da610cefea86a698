#pragma once

#include <cstddef>
#include <functional>

namespace flipspec {

// Worker count: hardware concurrency, capped by FLIPSPEC_THREADS when set.
std::size_t worker_count();

// Splits [0, count) into contiguous chunks and runs body(begin, end) on up to
// worker_count() threads. Exceptions from any chunk are rethrown (the first
// one wins) after all workers join.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace flipspec
