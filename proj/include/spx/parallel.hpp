#pragma once

#include <cstdint>

namespace spx {

// Process-wide worker count for the OpenMP kernels, set once by the CLI
// (--jobs N) or by tests. Every parallel loop in the library writes to
// disjoint per-index slots and keeps any floating-point accumulation in a
// fixed order, so results are identical for every job count.
void set_jobs(int jobs);
int jobs();

// Runs fn(i) for i in [0, n). Serial loop when jobs() == 1.
template <typename Fn>
void parallel_for(int64_t n, Fn&& fn);

namespace detail {
void parallel_for_impl(int64_t n, void (*trampoline)(void*, int64_t), void* ctx);
}

template <typename Fn>
void parallel_for(int64_t n, Fn&& fn) {
    auto trampoline = [](void* ctx, int64_t i) { (*static_cast<Fn*>(ctx))(i); };
    detail::parallel_for_impl(n, trampoline, &fn);
}

}  // namespace spx
