#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hitlab {

/// Resolves a requested worker count; 0 means "all hardware threads".
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls `body(i)` for every i in [0, n) using up to `workers` threads.
///
/// Work items are claimed dynamically, so `body` must not depend on which
/// thread runs it. Callers store per-item results by index and reduce them
/// in index order to keep aggregates independent of the worker count.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  workers = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// Splits [0, n) into fixed chunks of `chunk` items and runs `body(begin, end)`
/// per chunk. Chunk boundaries depend only on n and chunk.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk, unsigned workers, Body&& body) {
  const std::size_t chunks = (n + chunk - 1) / chunk;
  parallel_for(chunks, workers, [&](std::size_t c) {
    body(c * chunk, std::min(n, (c + 1) * chunk));
  });
}

}  // namespace hitlab
