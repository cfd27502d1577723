#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sphereform {

/// Global cap on worker threads (0 = hardware concurrency). The CLI sets it
/// from --threads; the library only reads it.
inline int& max_threads() {
  static int n = 0;
  return n;
}

/// Runs fn(i) for i in [0, count). Work is split into contiguous blocks, one
/// per worker. The first exception thrown by any worker is rethrown.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned workers = (max_threads() > 0) ? std::min<unsigned>(hw, max_threads()) : hw;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    const std::size_t chunk = std::max<std::size_t>(1, count / (4 * workers));
    for (;;) {
      std::size_t begin = next.fetch_add(chunk);
      if (begin >= count) break;
      std::size_t end = std::min(count, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sphereform
