#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace forage {

/// Runs fn(i) for i in [0, n). With workers <= 1 this is the plain serial
/// loop that every parallel kernel is tested against. Callers write results
/// into preallocated slot i so output order never depends on scheduling.
/// fn must not throw.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
#ifdef _OPENMP
  if (workers > 1 && n > 1) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) {
    fn(i);
  }
}

}  // namespace forage
