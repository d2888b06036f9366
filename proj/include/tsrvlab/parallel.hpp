#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tsrv {

/// Worker count: TSRVLAB_THREADS when set to a positive integer, else hardware concurrency.
inline std::size_t worker_count()
{
  if (const char* env = std::getenv("TSRVLAB_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) {
        return static_cast<std::size_t>(n);
      }
    } catch (const std::exception&) {
      // unparsable value: fall through to the default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Bodies must write only to slot i; callers
/// reduce the slots in index order afterwards so results do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, Body&& body)
{
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
              failure = std::current_exception();
            }
            next = count;
          }
        }
      });
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

} // namespace tsrv
