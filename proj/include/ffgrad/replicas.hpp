#pragma once

#include <exception>
#include <mutex>
#include <type_traits>
#include <vector>

namespace ffgrad {

int replica_threads();

// Runs fn(0), ..., fn(n-1) and returns the results in index order. The
// parallel path distributes indices over OpenMP threads; results are
// identical to the serial path whenever fn depends only on its index.
template <class F>
auto run_replicas(long n, F&& fn, bool parallel = true) -> std::vector<std::invoke_result_t<F&, long>> {
  using R = std::invoke_result_t<F&, long>;
  std::vector<R> out(static_cast<size_t>(n));
  if (!parallel) {
    for (long i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace ffgrad
