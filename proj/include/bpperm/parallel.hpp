#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bpperm {

// Calls fn(k) for k in [0, count) on up to `workers` threads. Work is handed
// out by index, so fn must write its result to a slot owned by k. The first
// exception thrown by fn stops the remaining work and is rethrown here.
template <class F>
void parallel_for(std::uint64_t count, unsigned workers, F&& fn) {
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(count, 1)));
  if (workers == 1) {
    for (std::uint64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bpperm
