#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace htdbu {

// Every parallel kernel keeps a serial twin; both must produce bitwise
// identical results, which the tests check.
enum class Exec { Serial, Parallel };

// Worker budget: HTDBU_WORKERS if set and positive, else machine parallelism.
int worker_count();

// Applies the worker budget to the OpenMP runtime and disables nested
// parallel regions. Called once by the CLI and the test mains.
void configure_workers();

// Rows are processed in fixed-size blocks, each with its own derived RNG
// stream, so results do not depend on the number of threads.
inline constexpr std::size_t kRowBlock = 256;

inline std::size_t block_count(std::size_t n, std::size_t block = kRowBlock) {
  return (n + block - 1) / block;
}

// Runs body(i) for i in [0, n). Exceptions thrown by any iteration are
// rethrown on the calling thread (first one wins).
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace htdbu
