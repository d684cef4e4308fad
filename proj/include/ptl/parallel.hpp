#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ptl/rng.hpp"

namespace ptl {

// Runs job(trial_index, trial_seed) for every trial and returns the results in
// trial order. Workers pull indices from a shared counter; trial i always
// receives split_seed(master_seed, i), so the output does not depend on the
// thread count or on scheduling. The first exception thrown by any worker
// stops the remaining work and is rethrown here; no partial result escapes.
template <typename Job>
auto parallel_trials(std::size_t trials, unsigned threads, std::uint64_t master_seed, Job&& job)
    -> std::vector<decltype(job(std::size_t{}, std::uint64_t{}))> {
  using Result = decltype(job(std::size_t{}, std::uint64_t{}));
  std::vector<std::optional<Result>> slots(trials);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= trials) return;
      try {
        slots[i].emplace(job(i, split_seed(master_seed, i)));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, trials)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<Result> out;
  out.reserve(trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Folds per-trial results in trial order. `merge` must be associative; the
// in-order fold makes floating-point aggregates reproducible bit for bit.
template <typename Job, typename Acc, typename Merge>
Acc parallel_reduce(std::size_t trials, unsigned threads, std::uint64_t master_seed, Job&& job,
                    Acc init, Merge&& merge) {
  auto results = parallel_trials(trials, threads, master_seed, std::forward<Job>(job));
  for (auto& r : results) init = merge(std::move(init), std::move(r));
  return init;
}

}  // namespace ptl
