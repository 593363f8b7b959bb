#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpfd::exec {

// Execution mode for the data-parallel kernels. Every parallel kernel has a
// serial twin that produces bit-identical output; tests and the benchmark
// target compare the two.
enum class Mode { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_max_threads(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    }
#else
    (void)n;
#endif
}

// Parallel loop over [0, n). Bodies must write disjoint state per index so
// the result is independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Mode mode, Fn&& fn) {
    if (mode == Mode::Serial) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        fn(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < n; ++i) {
        fn(i);
    }
#endif
}

} // namespace dpfd::exec
