#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace medpu {

// Worker cap: MEDPU_THREADS if set, otherwise hardware concurrency.
inline unsigned worker_count() {
  static const unsigned cached = [] {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MEDPU_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return std::min<unsigned>(static_cast<unsigned>(v), 256u);
    }
    return hw;
  }();
  return cached;
}

// Runs fn(i) for i in [0, n) across workers. Each index writes only its own
// output slot, so results do not depend on the thread count; reductions must
// be done by the caller in index order. serial_threshold controls when the
// loop is worth spreading; pass a small value for coarse-grained tasks.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t serial_threshold = 2048) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < std::max<std::size_t>(serial_threshold, 2)) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = static_cast<std::size_t>(w) * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace medpu
