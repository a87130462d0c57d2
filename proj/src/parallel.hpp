#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bmit::detail {

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(worker, begin, end) over [0, n) in chunks handed out from a
/// shared counter. Which worker handles which chunk is unspecified, so
/// callers must write results by index and reduce them in index order.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t threads, std::size_t chunk, Body&& body) {
  if (n == 0) return;
  threads = std::min(resolve_threads(threads), (n + chunk - 1) / chunk);
  if (threads <= 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](std::size_t id) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        body(id, begin, std::min(n, begin + chunk));
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (std::size_t id = 1; id < threads; ++id) pool.emplace_back(worker, id);
  worker(0);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace bmit::detail
