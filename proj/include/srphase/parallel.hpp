// parallel.hpp — Deterministic static-partition parallel loop.
#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace srphase {

// Runs fn(i) for i in [0, n). Work is split into contiguous index blocks, one
// per worker, so results written to slot i are identical for any thread count.
template <class F>
void parallel_for(std::size_t n, int threads, const F& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t t = threads > 0 ? static_cast<std::size_t>(threads) : (hw ? hw : 1);
  if (n == 0) return;
  t = std::min(t, n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto run_block = [&](std::size_t lo, std::size_t hi) {
    try {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t k = 0; k < t; ++k)
    pool.emplace_back(run_block, n * k / t, n * (k + 1) / t);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace srphase
