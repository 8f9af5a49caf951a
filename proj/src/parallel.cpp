#include "smtm/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace smtm {

namespace {

int env_cap() {
  const char* raw = std::getenv("SMTM_THREADS");
  if (raw == nullptr) return 0;
  try {
    return std::max(0, std::stoi(raw));
  } catch (...) {
    return 0;
  }
}

}  // namespace

int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const int cap = env_cap(); cap > 0) n = std::min(n, cap);
  return std::max(1, n);
}

int configure_workers() {
  const int n = worker_count();
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
  return n;
}

}  // namespace smtm
