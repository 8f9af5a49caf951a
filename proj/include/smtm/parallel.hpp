#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smtm {

/// Size of the worker pool: OpenMP's default, capped by SMTM_THREADS if set.
int worker_count();

/// Applies the SMTM_THREADS cap to the OpenMP runtime. Returns the pool size.
int configure_workers();

/// Runs body(i) for i in [0, n), on an OpenMP team when `parallel` is set.
/// The first exception thrown by any iteration is rethrown on the caller.
template <class Body>
void parallel_for(bool parallel, std::size_t n, Body&& body) {
  std::exception_ptr failure;
  std::once_flag once;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (parallel && n > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::call_once(once, [&] { failure = std::current_exception(); });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Same with dynamic scheduling, for uneven work items such as whole chains.
template <class Body>
void parallel_for_dynamic(bool parallel, std::size_t n, Body&& body) {
  std::exception_ptr failure;
  std::once_flag once;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel && n > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::call_once(once, [&] { failure = std::current_exception(); });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace smtm
