#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ulab {

/**
 * Calls body(i) for i in [0, count) on up to @p threads workers.
 * Indices are split into contiguous blocks; callers write results into
 * per-index slots so the outcome never depends on the schedule.
 * The exception thrown at the lowest index is rethrown.
 */
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> failed_at(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = w * block;
      const std::size_t hi = std::min(count, lo + block);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          body(i);
        } catch (...) {
          errors[w] = std::current_exception();
          failed_at[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::size_t first = count;
  std::exception_ptr error;
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w] && failed_at[w] < first) {
      first = failed_at[w];
      error = errors[w];
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ulab
