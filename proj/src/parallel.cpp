#include "soblab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace soblab {

int workerCount() {
  static const int count = [] {
    if (const char* env = std::getenv("SOBLAB_WORKERS")) {
      const int v = std::atoi(env);
      if (v >= 1) return std::min(v, 256);
    }
    return 1;
  }();
  return count;
}

void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = workerCount();
  if (workers <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace soblab
