#pragma once

#include <cstddef>
#include <functional>

namespace pixelhand {

/// Worker count for internal loops: hardware concurrency, capped by the
/// PIXELHAND_THREADS environment variable when it holds a positive integer.
std::size_t worker_count();

/// Runs body(i) for i in [begin, end) split into contiguous blocks over at
/// most worker_count() threads. Each index is visited exactly once, so bodies
/// that write disjoint outputs stay deterministic.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace pixelhand
