#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cssdpp {

/// Worker count: CSSDPP_THREADS when set, hardware concurrency otherwise.
unsigned thread_count();

/// Runs body(task) for task in [0, n_tasks) on up to thread_count() threads.
///
/// Tasks are claimed dynamically, so callers that need thread-count
/// independent results must write per-task outputs and reduce them in task
/// order afterwards. The first exception thrown by any task is rethrown.
template <typename Body>
void parallel_tasks(std::size_t n_tasks, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n_tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) {
      body(t);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      try {
        body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next = n_tasks;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  pool.clear();
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace cssdpp
