#ifndef MAPMATCH_PARALLEL_HPP
#define MAPMATCH_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mapmatch {

// Runs f(i) for i in [0, n). With parallel=true the iterations run under
// OpenMP; every call site keeps the serial path as the reference
// implementation, and results must not depend on iteration order.
template <typename F>
void parallel_for(std::size_t n, bool parallel, F&& f) {
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            f(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace mapmatch

#endif
