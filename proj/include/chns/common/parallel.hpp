#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace chns {

/// Number of worker threads used by traversal assembly. CHNS_THREADS overrides the
/// programmatic setting so that runs can be pinned from the environment.
inline int& thread_count_storage() {
  static int n = 1;
  return n;
}

inline int thread_count() {
  if (const char* env = std::getenv("CHNS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return thread_count_storage();
}

inline void set_thread_count(int n) { thread_count_storage() = n > 0 ? n : 1; }

/// Runs body(p) for p in [0, n). Partitions run concurrently when more than one
/// thread is configured; exceptions are rethrown on the calling thread.
inline void parallel_for_partitions(int n, const std::function<void(int)>& body) {
  if (n <= 1) {
    for (int p = 0; p < n; ++p) body(p);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  workers.reserve(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    workers.emplace_back([&, p] {
      try {
        body(p);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace chns
