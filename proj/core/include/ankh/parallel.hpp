#pragma once

#include <cstddef>
#include <functional>

namespace ankh {

/// Resolve a thread-count request: values <= 0 pick the hardware concurrency.
int resolve_threads(int requested);

/// Static contiguous split of [0, n) into at most `threads` chunks.
/// Chunk results must not depend on the split; runs inline for threads <= 1.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

/// Per-chunk partial sums combined in chunk order, so a fixed thread count
/// gives run-to-run identical results.
double parallel_sum(std::size_t n, int threads,
                    const std::function<double(std::size_t, std::size_t)>& fn);

}  // namespace ankh
