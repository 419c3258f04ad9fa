#include <cmath>
#include <queue>
#include <vector>

#include "spx/superpixel.hpp"
#include "superpixel_internal.hpp"

namespace spx {

using detail::kDx;
using detail::kDy;

namespace {

struct FrontEntry {
    double arrival;
    uint64_t seq;  // insertion order, makes equal-arrival pops deterministic
    int64_t pixel;
    uint32_t region;
};

struct FrontLater {
    bool operator()(const FrontEntry& a, const FrontEntry& b) const {
        if (a.arrival != b.arrival) return a.arrival > b.arrival;
        return a.seq > b.seq;
    }
};

}  // namespace

Segmentation ergc(const GrayImage& g, const Mask& m, const SuperpixelParams& p,
                  std::vector<double>* arrival_trace) {
    detail::check_superpixel_inputs(g, m, p);
    const int w = g.width, h = g.height;
    const int64_t nvalid = m.valid_count();
    const double S = std::sqrt(static_cast<double>(nvalid) / p.k_target);
    const double spatial_weight = p.compactness / S;

    const auto seeds = grid_seeds(m, p.k_target);
    std::vector<uint32_t> labels(static_cast<size_t>(w) * h, kInvalidSegment);

    struct Region {
        double sum = 0;
        int64_t n = 0;
        double seed_x = 0, seed_y = 0;
        double mean() const { return sum / static_cast<double>(n); }
    };
    std::vector<Region> regions(seeds.size());

    std::priority_queue<FrontEntry, std::vector<FrontEntry>, FrontLater> queue;
    uint64_t seq = 0;
    for (uint32_t r = 0; r < seeds.size(); ++r) {
        regions[r].seed_x = static_cast<double>(seeds[r] % w);
        regions[r].seed_y = static_cast<double>(seeds[r] / w);
        queue.push({0.0, seq++, seeds[r], r});
    }

    if (arrival_trace) arrival_trace->clear();
    while (!queue.empty()) {
        const FrontEntry e = queue.top();
        queue.pop();
        if (labels[e.pixel] != kInvalidSegment) continue;  // already claimed
        labels[e.pixel] = e.region;
        if (arrival_trace) arrival_trace->push_back(e.arrival);
        Region& reg = regions[e.region];
        reg.sum += g.values[e.pixel];
        ++reg.n;
        const double mean = reg.mean();
        const int x = static_cast<int>(e.pixel % w), y = static_cast<int>(e.pixel / w);
        for (int d = 0; d < 4; ++d) {
            const int nx = x + kDx[d], ny = y + kDy[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const int64_t ni = static_cast<int64_t>(ny) * w + nx;
            if (!m.valid[ni] || labels[ni] != kInvalidSegment) continue;
            const double ddx = nx - reg.seed_x, ddy = ny - reg.seed_y;
            const double cost = std::abs(g.values[ni] - mean) +
                                spatial_weight * std::sqrt(ddx * ddx + ddy * ddy);
            queue.push({e.arrival + cost, seq++, ni, e.region});
        }
    }

    return detail::finalize_segmentation(std::move(labels), m, p.resolved_min_size(nvalid));
}

}  // namespace spx
