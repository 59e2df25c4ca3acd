#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace geophase::detail {

// Splits [begin, end) into contiguous chunks, one per worker. The body must
// only touch per-index state, so the result is independent of scheduling.
template <typename F>
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, F&& body) {
  const std::ptrdiff_t count = end - begin;
  if (count <= 0) {
    return;
  }
  std::ptrdiff_t workers = static_cast<std::ptrdiff_t>(std::thread::hardware_concurrency());
  workers = std::clamp<std::ptrdiff_t>(workers, 1, count);
  if (workers == 1) {
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      body(i);
    }
    return;
  }
  const std::ptrdiff_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::ptrdiff_t w = 0; w < workers; ++w) {
    const std::ptrdiff_t lo = begin + chunk * w;
    const std::ptrdiff_t hi = std::min(end, lo + chunk);
    if (lo >= hi) {
      break;
    }
    pool.emplace_back([lo, hi, &body] {
      for (std::ptrdiff_t i = lo; i < hi; ++i) {
        body(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

}  // namespace geophase::detail
