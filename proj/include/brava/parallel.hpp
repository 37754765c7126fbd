#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace brava {

// Process-wide worker count used by the parallel kernels. 0 selects
// std::thread::hardware_concurrency().
void set_num_threads(std::size_t n);
std::size_t num_threads();

// Splits [0, n) into at most num_threads() contiguous chunks and calls
// fn(begin, end, chunk_index) for each, one thread per chunk. Chunk boundaries
// depend only on n and the thread count, so per-chunk results reduced in chunk
// order are reproducible for a fixed thread count.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(num_threads(), n));
  if (workers <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t base = n / workers;
  const std::size_t extra = n % workers;
  std::size_t begin = 0;
  std::size_t first_end = 0;
  for (std::size_t c = 0; c < workers; ++c) {
    const std::size_t end = begin + base + (c < extra ? 1 : 0);
    if (c == 0) {
      first_end = end;
    } else {
      pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
    }
    begin = end;
  }
  fn(std::size_t{0}, first_end, std::size_t{0});
  for (auto& t : pool) t.join();
}

inline std::size_t chunk_count(std::size_t n) {
  return std::max<std::size_t>(1, std::min(num_threads(), n));
}

}  // namespace brava
