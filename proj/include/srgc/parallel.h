#ifndef SRGC_PARALLEL_H_
#define SRGC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srgc {

// Runs fn(i) for every i in [0, count) on up to `threads` workers. Work items
// are claimed dynamically, so fn must only write to slot-i outputs; results
// are then independent of scheduling. The first exception thrown by any item
// is rethrown on the calling thread.
template <typename Fn>
void ParallelFor(size_t count, int threads, Fn&& fn) {
  const size_t workers =
      std::min<size_t>(count, static_cast<size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace srgc

#endif  // SRGC_PARALLEL_H_
