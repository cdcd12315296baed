#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace confsec {

/// Splits [0, n) into `threads` contiguous chunks and runs body(chunk, begin, end)
/// on each. Chunk boundaries depend only on n and threads; callers reduce
/// per-chunk results in chunk order so the outcome does not depend on scheduling.
template <typename Body>
void parallel_chunks(std::size_t n, int threads, Body&& body) {
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads < 1 ? 1 : threads, n));
  auto range = [&](std::size_t c) {
    return std::pair<std::size_t, std::size_t>{n * c / chunks, n * (c + 1) / chunks};
  };
  if (chunks == 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(chunks);
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      try {
        auto [b, e] = range(c);
        body(c, b, e);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Thread count from an explicit value, else CONFSEC_THREADS, else 1.
int resolve_threads(int requested);

}  // namespace confsec
