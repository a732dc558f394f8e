#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wclt {

// Execution policy for the replicated kernels. Every parallel kernel keeps a
// serial reference path; both must produce bit-identical results, which the
// test suite asserts.
enum class Exec { serial, openmp };

// Runs fn(i) for i in [0, n). Under the openmp policy iterations are
// distributed across threads; callers store results indexed by i so the merge
// order is fixed and output matches the serial reference exactly.
template <class F>
void parallel_for(std::size_t n, int threads, Exec exec, F&& fn) {
    (void)threads;
#ifdef _OPENMP
    if (exec == Exec::openmp) {
        const long long nn = static_cast<long long>(n);
        if (threads > 0) {
#pragma omp parallel for schedule(static) num_threads(threads)
            for (long long i = 0; i < nn; ++i) fn(static_cast<std::size_t>(i));
        } else {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < nn; ++i) fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace wclt
