#pragma once

#include <omp.h>

#include <cstddef>
#include <exception>

namespace rydlat {

// Caps the worker count used by every parallel loop (<= 0 keeps the default).
inline void set_thread_count(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

inline int thread_count() { return omp_get_max_threads(); }

// Runs fn(i) for i in [0, count) across threads. If any iterations throw, the
// exception from the lowest index is rethrown after the loop, so failures are
// reported the same way regardless of scheduling.
template <class Fn>
void parallel_for(std::ptrdiff_t count, Fn&& fn) {
    std::exception_ptr error;
    std::ptrdiff_t error_index = count;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(rydlat_parallel_error)
            {
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace rydlat
