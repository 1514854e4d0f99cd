#include "ankh/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace ankh {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t chunks = std::min<std::size_t>(std::max(threads, 1), n);
  if (chunks <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

double parallel_sum(std::size_t n, int threads,
                    const std::function<double(std::size_t, std::size_t)>& fn) {
  if (n == 0) return 0.0;
  const std::size_t chunks = std::min<std::size_t>(std::max(threads, 1), n);
  if (chunks <= 1) return fn(0, n);
  std::vector<double> partial(chunks, 0.0);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    pool.emplace_back([&fn, &partial, c, begin, end] { partial[c] = fn(begin, end); });
  }
  for (auto& t : pool) t.join();
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc;
}

}  // namespace ankh
