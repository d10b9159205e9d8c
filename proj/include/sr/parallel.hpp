#pragma once

#include <cstdlib>
#include <functional>

#ifdef SR_HAVE_OPENMP
#include <omp.h>
#endif

namespace sr {

enum class Exec { Serial, Parallel };

// Worker cap: explicit argument wins, then SR_THREADS, then the OpenMP default.
inline int worker_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SR_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
#ifdef SR_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Index-parallel loop over [0, n). Each body writes only to its own slot, so
// results are identical for any schedule and for the serial reference path.
template <class Fn>
void parallel_for(std::size_t n, const Fn& fn, Exec exec = Exec::Parallel, int threads = 0) {
#ifdef SR_HAVE_OPENMP
  if (exec == Exec::Parallel) {
    const int nw = worker_count(threads);
#pragma omp parallel for schedule(dynamic) num_threads(nw)
    for (long long i = 0; i < static_cast<long long>(n); ++i) fn(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)threads;
  (void)exec;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace sr
