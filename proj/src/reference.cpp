#include "spx/reference.hpp"

#include <cmath>
#include <limits>

#include "superpixel_internal.hpp"

namespace spx::reference {

namespace {

void slic_assign_serial(const GrayImage& g, const Mask& m,
                        const std::vector<detail::SlicCenter>& centers, double S,
                        double spatial_weight, std::vector<uint32_t>& labels,
                        std::vector<double>& best) {
    const int w = g.width, h = g.height;
    labels.assign(static_cast<size_t>(w) * h, kInvalidSegment);
    best.assign(static_cast<size_t>(w) * h, std::numeric_limits<double>::infinity());
    for (uint32_t c = 0; c < centers.size(); ++c) {
        const detail::WindowBox box = detail::slic_window(centers[c], S, w, h);
        for (int y = box.y0; y <= box.y1; ++y)
            for (int x = box.x0; x <= box.x1; ++x) {
                const int64_t i = static_cast<int64_t>(y) * w + x;
                if (!m.valid[i]) continue;
                double d;
                if (!detail::slic_distance(centers[c], g.values[i], static_cast<double>(x),
                                           static_cast<double>(y), S, spatial_weight, &d))
                    continue;
                // ascending c, so strict < keeps the smaller id on ties
                if (d < best[i]) {
                    best[i] = d;
                    labels[i] = c;
                }
            }
    }
}

}  // namespace

Segmentation slic(const GrayImage& g, const Mask& m, const SuperpixelParams& p) {
    detail::check_superpixel_inputs(g, m, p);
    const int64_t nvalid = m.valid_count();
    const double S = std::sqrt(static_cast<double>(nvalid) / p.k_target);
    const double spatial_weight = p.compactness / S;

    auto centers = detail::slic_init_centers(g, m, p.k_target);
    std::vector<uint32_t> labels;
    std::vector<double> best;
    for (int iter = 0; iter < p.iterations; ++iter) {
        slic_assign_serial(g, m, centers, S, spatial_weight, labels, best);
        detail::slic_update_centers(g, m, labels, centers, S);
    }
    return detail::finalize_segmentation(std::move(labels), m, p.resolved_min_size(nvalid));
}

}  // namespace spx::reference
