#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace krr::par {

/// Worker count for parallel kernels. KREIN_RIDGE_THREADS, when set to a
/// positive integer, caps the count; otherwise the OpenMP default applies.
/// Returns 1 when built without OpenMP.
inline int max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("KREIN_RIDGE_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && cap < n) n = static_cast<int>(cap);
  }
  return n > 0 ? n : 1;
#else
  return 1;
#endif
}

}  // namespace krr::par
