#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace drc {

// Static strided partition. Every index is computed by a pure function that
// writes only its own output slot, so results are identical for any worker
// count. workers <= 1 runs inline.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (std::size_t w = 0; w < k; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += k) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace drc
