#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

#include <thread>

namespace exchg {

// Resolves a worker-count request: values > 0 are taken as-is, anything else
// means "use the available parallelism". Always at least 1.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
#endif
  return hw > 0 ? hw : 1;
}

// Runs body(0..count-1) across `workers` threads. The body must only write
// state owned by its own index (e.g. a pre-sized result slot), which keeps
// results identical to the serial path regardless of scheduling.
template <typename Body>
void parallel_index_for(int count, int workers, Body&& body) {
  const int w = resolve_workers(workers);
#ifdef _OPENMP
  if (w > 1 && count > 1) {
#pragma omp parallel for num_threads(w) schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
#endif
  (void)w;
  for (int i = 0; i < count; ++i) {
    body(i);
  }
}

}  // namespace exchg
