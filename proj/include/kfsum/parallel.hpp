#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kfsum {

struct ExecPolicy {
  unsigned workers = 1;
};

/// Calls body(i) for every i in [0, count). Each index must write only its
/// own output slot; callers reduce the slots in index order afterwards, so
/// results never depend on the worker count.
template <typename Body>
void parallel_for(std::size_t count, const ExecPolicy& policy, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, policy.workers), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kfsum
