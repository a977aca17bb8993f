#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "fpt/montecarlo.hpp"

namespace fpt::detail {

/// Runs f(begin, end) over contiguous chunks of [0, n) on worker threads.
/// Callers write into disjoint slots and fold afterwards in index order.
template <class F>
void parallel_chunks(std::size_t n, F&& f, std::size_t min_chunk = 256) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(worker_count(), (n + min_chunk - 1) / min_chunk));
  if (workers == 1) {
    f(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(n, w * chunk);
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      try {
        f(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fpt::detail
