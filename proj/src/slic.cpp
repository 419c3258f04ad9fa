#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "spx/parallel.hpp"
#include "spx/superpixel.hpp"
#include "superpixel_internal.hpp"

namespace spx {

namespace detail {

namespace {

// Gradient magnitude proxy at (x, y); invalid or out-of-range neighbors fall
// back to the center sample.
double local_gradient(const GrayImage& g, const Mask& m, int x, int y) {
    const double c = g.at(x, y);
    auto sample = [&](int sx, int sy) {
        if (sx < 0 || sy < 0 || sx >= g.width || sy >= g.height || !m.at(sx, sy)) return c;
        return g.at(sx, sy);
    };
    return std::abs(sample(x + 1, y) - sample(x - 1, y)) +
           std::abs(sample(x, y + 1) - sample(x, y - 1));
}

}  // namespace

std::vector<SlicCenter> slic_init_centers(const GrayImage& g, const Mask& m, int k) {
    const auto seeds = grid_seeds(m, k);
    std::vector<SlicCenter> centers;
    centers.reserve(seeds.size());
    std::unordered_set<int64_t> used;
    for (const int64_t s : seeds) {
        const int sx = static_cast<int>(s % g.width), sy = static_cast<int>(s / g.width);
        // move to the lowest-gradient free pixel in the 3x3 window
        int bx = sx, by = sy;
        double best = std::numeric_limits<double>::infinity();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = sx + dx, y = sy + dy;
                if (x < 0 || y < 0 || x >= g.width || y >= g.height || !m.at(x, y)) continue;
                if (used.count(static_cast<int64_t>(y) * g.width + x)) continue;
                const double grad = local_gradient(g, m, x, y);
                if (grad < best) {
                    best = grad;
                    bx = x;
                    by = y;
                }
            }
        used.insert(static_cast<int64_t>(by) * g.width + bx);
        centers.push_back({g.at(bx, by), static_cast<double>(bx), static_cast<double>(by)});
    }
    return centers;
}

void slic_assign(const GrayImage& g, const Mask& m, const std::vector<SlicCenter>& centers,
                 double S, double spatial_weight, std::vector<uint32_t>& labels) {
    const int w = g.width, h = g.height;
    labels.assign(static_cast<size_t>(w) * h, kInvalidSegment);

    // Bucket centers on an S-sized grid; a pixel's window candidates live in
    // the +-2 bucket neighborhood. Bucket lists keep ascending center ids.
    const int nbx = std::max(1, static_cast<int>(std::ceil(w / S)));
    const int nby = std::max(1, static_cast<int>(std::ceil(h / S)));
    std::vector<std::vector<uint32_t>> buckets(static_cast<size_t>(nbx) * nby);
    auto bucket_of = [&](double x, double y) {
        const int bx = std::clamp(static_cast<int>(x / S), 0, nbx - 1);
        const int by = std::clamp(static_cast<int>(y / S), 0, nby - 1);
        return static_cast<size_t>(by) * nbx + bx;
    };
    for (uint32_t c = 0; c < centers.size(); ++c)
        buckets[bucket_of(centers[c].x, centers[c].y)].push_back(c);

    parallel_for(static_cast<int64_t>(h), [&](int64_t y) {
        for (int x = 0; x < w; ++x) {
            const int64_t i = y * w + x;
            if (!m.valid[i]) continue;
            const double px = static_cast<double>(x), py = static_cast<double>(y);
            const double intensity = g.values[i];
            const int pbx = std::clamp(static_cast<int>(px / S), 0, nbx - 1);
            const int pby = std::clamp(static_cast<int>(py / S), 0, nby - 1);
            double best_d = std::numeric_limits<double>::infinity();
            uint32_t best_c = kInvalidSegment;
            for (int bj = std::max(0, pby - 2); bj <= std::min(nby - 1, pby + 2); ++bj)
                for (int bi = std::max(0, pbx - 2); bi <= std::min(nbx - 1, pbx + 2); ++bi)
                    for (const uint32_t c : buckets[static_cast<size_t>(bj) * nbx + bi]) {
                        double d;
                        if (!slic_distance(centers[c], intensity, px, py, S, spatial_weight, &d))
                            continue;
                        if (d < best_d || (d == best_d && c < best_c)) {
                            best_d = d;
                            best_c = c;
                        }
                    }
            labels[i] = best_c;
        }
    });
}

void slic_update_centers(const GrayImage& g, const Mask& m, const std::vector<uint32_t>& labels,
                         std::vector<SlicCenter>& centers, double S) {
    const int w = g.width, h = g.height;
    parallel_for(static_cast<int64_t>(centers.size()), [&](int64_t c) {
        const WindowBox b = slic_window(centers[c], S, w, h);
        double si = 0, sx = 0, sy = 0;
        int64_t n = 0;
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) {
                const int64_t i = static_cast<int64_t>(y) * w + x;
                if (!m.valid[i] || labels[i] != static_cast<uint32_t>(c)) continue;
                si += g.values[i];
                sx += x;
                sy += y;
                ++n;
            }
        if (n > 0)
            centers[c] = {si / static_cast<double>(n), sx / static_cast<double>(n),
                          sy / static_cast<double>(n)};
    });
}

}  // namespace detail

Segmentation slic(const GrayImage& g, const Mask& m, const SuperpixelParams& p) {
    detail::check_superpixel_inputs(g, m, p);
    const int64_t nvalid = m.valid_count();
    const double S = std::sqrt(static_cast<double>(nvalid) / p.k_target);
    const double spatial_weight = p.compactness / S;

    auto centers = detail::slic_init_centers(g, m, p.k_target);
    std::vector<uint32_t> labels;
    for (int iter = 0; iter < p.iterations; ++iter) {
        detail::slic_assign(g, m, centers, S, spatial_weight, labels);
        detail::slic_update_centers(g, m, labels, centers, S);
    }
    return detail::finalize_segmentation(std::move(labels), m, p.resolved_min_size(nvalid));
}

}  // namespace spx
