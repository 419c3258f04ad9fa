#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spx/parallel.hpp"
#include "spx/superpixel.hpp"
#include "superpixel_internal.hpp"

namespace spx {

using detail::kDx;
using detail::kDy;

namespace {

// Path key compared lexicographically. cost is the primary objective,
// hops realizes the spatial tie-break, and the remaining fields pin a unique
// canonical path state so relaxation is deterministic.
struct PathKey {
    double cost = std::numeric_limits<double>::infinity();
    int32_t hops = 0;
    double max_edge = 0;  // max |dI| over edges, unscaled
    double path_max = 0;  // max intensity over vertices
    double path_min = 0;  // min intensity over vertices

    bool operator<(const PathKey& o) const {
        if (cost != o.cost) return cost < o.cost;
        if (hops != o.hops) return hops < o.hops;
        if (max_edge != o.max_edge) return max_edge < o.max_edge;
        if (path_max != o.path_max) return path_max < o.path_max;
        return path_min > o.path_min;
    }
};

struct HeapEntry {
    PathKey key;
    int64_t pixel;
};
struct HeapLater {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (b.key < a.key) return true;
        if (a.key < b.key) return false;
        return a.pixel > b.pixel;
    }
};

}  // namespace

namespace detail {

// Exact arrival map of one seed over the whole valid area: Dijkstra under
// the total order on PathKey, so the fixed point is unique.
void rss_seed_map(const GrayImage& g, const Mask& m, int64_t seed, double gamma,
                  std::vector<double>& cost_out, std::vector<int32_t>& hops_out) {
    const int w = g.width, h = g.height;
    const int64_t n = static_cast<int64_t>(w) * h;
    std::vector<PathKey> best(n);
    std::vector<uint8_t> done(n, 0);
    cost_out.assign(n, std::numeric_limits<double>::infinity());
    hops_out.assign(n, -1);

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLater> heap;
    const double seed_i = g.values[seed];
    best[seed] = {0.0, 0, 0.0, seed_i, seed_i};
    heap.push({best[seed], seed});

    while (!heap.empty()) {
        const HeapEntry e = heap.top();
        heap.pop();
        if (done[e.pixel] || best[e.pixel] < e.key) continue;
        done[e.pixel] = 1;
        cost_out[e.pixel] = e.key.cost;
        hops_out[e.pixel] = e.key.hops;
        const int x = static_cast<int>(e.pixel % w), y = static_cast<int>(e.pixel / w);
        for (int d = 0; d < 4; ++d) {
            const int nx = x + kDx[d], ny = y + kDy[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int64_t ni = static_cast<int64_t>(ny) * w + nx;
            if (!m.valid[ni] || done[ni]) continue;
            const double vi = g.values[ni];
            const double edge = std::abs(vi - g.values[e.pixel]);
            PathKey k;
            k.max_edge = std::max(e.key.max_edge, edge);
            k.path_max = std::max(e.key.path_max, vi);
            k.path_min = std::min(e.key.path_min, vi);
            k.cost = gamma * k.max_edge + (k.path_max - k.path_min);
            k.hops = e.key.hops + 1;
            if (k < best[ni]) {
                best[ni] = k;
                heap.push({k, ni});
            }
        }
    }
}

}  // namespace detail

Segmentation rss(const GrayImage& g, const Mask& m, const SuperpixelParams& p) {
    detail::check_superpixel_inputs(g, m, p);
    const int w = g.width, h = g.height;
    const int64_t n = static_cast<int64_t>(w) * h;
    const int64_t nvalid = m.valid_count();

    const auto seeds = grid_seeds(m, p.k_target);
    const auto nseeds = static_cast<int>(seeds.size());

    // Per-seed maps reduce into (cost, hops, root) argmin slots. The min is a
    // total order, so the merge result is independent of thread partitioning.
    struct Best {
        std::vector<double> cost;
        std::vector<int32_t> hops;
        std::vector<uint32_t> root;
        void init(int64_t n) {
            cost.assign(n, std::numeric_limits<double>::infinity());
            hops.assign(n, -1);
            root.assign(n, kInvalidSegment);
        }
        void take(int64_t i, double c, int32_t hp, uint32_t r) {
            if (c < cost[i] || (c == cost[i] && (hp < hops[i] || (hp == hops[i] && r < root[i])))) {
                cost[i] = c;
                hops[i] = hp;
                root[i] = r;
            }
        }
    };

    const int nthreads = std::max(1, std::min(jobs(), nseeds));
    std::vector<Best> partial(nthreads);
    for (auto& b : partial) b.init(n);

    auto run_chunk = [&](int t) {
        std::vector<double> cost;
        std::vector<int32_t> hops;
        Best& mine = partial[t];
        for (int s = t; s < nseeds; s += nthreads) {
            detail::rss_seed_map(g, m, seeds[s], p.compactness, cost, hops);
            for (int64_t i = 0; i < n; ++i)
                if (hops[i] >= 0) mine.take(i, cost[i], hops[i], static_cast<uint32_t>(s));
        }
    };
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(nthreads)
    for (int t = 0; t < nthreads; ++t) run_chunk(t);
#else
    for (int t = 0; t < nthreads; ++t) run_chunk(t);
#endif

    Best merged = std::move(partial[0]);
    for (int t = 1; t < nthreads; ++t)
        for (int64_t i = 0; i < n; ++i)
            if (partial[t].hops[i] >= 0)
                merged.take(i, partial[t].cost[i], partial[t].hops[i], partial[t].root[i]);

    std::vector<uint32_t> labels(n, kInvalidSegment);
    for (int64_t i = 0; i < n; ++i)
        if (m.valid[i]) labels[i] = merged.root[i];

    return detail::finalize_segmentation(std::move(labels), m, p.resolved_min_size(nvalid));
}

}  // namespace spx
