#include "brava/parallel.hpp"

#include <atomic>

namespace brava {

namespace {
std::atomic<std::size_t> g_threads{0};
}

void set_num_threads(std::size_t n) { g_threads.store(n); }

std::size_t num_threads() {
  const std::size_t n = g_threads.load();
  if (n != 0) return n;
  return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

}  // namespace brava
