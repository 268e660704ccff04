#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "airslice/chain_oracle.hpp"

namespace airslice {

/// Thread count for `jobs`; 0 means the OpenMP default.
int resolve_jobs(int jobs);

/// Evaluates fn(i) for i in [0, n) and returns the results in index order.
/// The parallel path uses a dynamic OpenMP schedule; an exception thrown by
/// any item is rethrown (lowest index first) after the loop.
template <typename R, typename Fn>
std::vector<R> map_indexed(std::size_t n, Fn&& fn, Execution exec, int jobs = 0) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> err(n);
  const auto count = static_cast<long long>(n);
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_jobs(jobs))
    for (long long i = 0; i < count; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
      } catch (...) {
        err[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < count; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
      } catch (...) {
        err[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace airslice
