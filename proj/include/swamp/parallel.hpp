#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swamp {

  /// Runs fn(i) for i in [0, count) on up to `threads` workers, handing out chunks dynamically.
  /// `threads` <= 1 runs inline. The first exception thrown by a worker is rethrown.
  template<typename Fn>
  void parallel_for(std::size_t count, unsigned threads, Fn&& fn, std::size_t chunk = 16) {
    if (threads <= 1 || count <= chunk) {
      for (std::size_t i = 0; i < count; ++i) { fn(i); }
      return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, (count + chunk - 1) / chunk));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
      try {
        for (;;) {
          const std::size_t begin = next.fetch_add(chunk);
          if (begin >= count) { return; }
          const std::size_t end = std::min(count, begin + chunk);
          for (std::size_t i = begin; i < end; ++i) { fn(i); }
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) { error = std::current_exception(); }
        next.store(count);
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) { pool.emplace_back(body); }
    body();
    pool.clear();
    if (error) { std::rethrow_exception(error); }
  }

} // namespace swamp
