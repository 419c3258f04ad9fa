#include "spx/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spx {

namespace {
std::atomic<int> g_jobs{1};
}

void set_jobs(int jobs) { g_jobs.store(jobs < 1 ? 1 : jobs); }

int jobs() { return g_jobs.load(); }

namespace detail {

void parallel_for_impl(int64_t n, void (*trampoline)(void*, int64_t), void* ctx) {
    const int nj = jobs();
    if (nj <= 1 || n < 2) {
        for (int64_t i = 0; i < n; ++i) trampoline(ctx, i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nj)
    for (int64_t i = 0; i < n; ++i) trampoline(ctx, i);
#else
    for (int64_t i = 0; i < n; ++i) trampoline(ctx, i);
#endif
}

}  // namespace detail
}  // namespace spx
