#include <algorithm>
#include <cmath>
#include <vector>

#include "spx/superpixel.hpp"
#include "superpixel_internal.hpp"

namespace spx {

using detail::kDx;
using detail::kDy;

namespace {

constexpr double kVarianceFloor = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

struct SegStats {
    int64_t n = 0;
    double sum = 0, sumsq = 0;
};

// Gaussian log-likelihood of the segment's members under its own ML
// mean/variance, with the variance floored.
double log_likelihood(const SegStats& s) {
    if (s.n == 0) return 0.0;
    const double nd = static_cast<double>(s.n);
    double ss = s.sumsq - s.sum * s.sum / nd;
    if (ss < 0) ss = 0;
    const double var = ss / nd;
    if (var < kVarianceFloor)
        return -0.5 * nd * (kLog2Pi + std::log(kVarianceFloor)) - 0.5 * ss / kVarianceFloor;
    return -0.5 * nd * (kLog2Pi + std::log(var) + 1.0);
}

}  // namespace

Segmentation crs(const GrayImage& g, const Mask& m, const SuperpixelParams& p,
                 std::vector<double>* objective_trace) {
    detail::check_superpixel_inputs(g, m, p);
    const int w = g.width, h = g.height;
    const int64_t nvalid = m.valid_count();

    std::vector<uint32_t> labels = initial_grid_partition(m, p.k_target);
    uint32_t nseg = 0;
    for (const uint32_t l : labels)
        if (l != kInvalidSegment) nseg = std::max(nseg, l + 1);

    std::vector<SegStats> stats(nseg);
    for (int64_t i = 0; i < static_cast<int64_t>(labels.size()); ++i)
        if (labels[i] != kInvalidSegment) {
            SegStats& st = stats[labels[i]];
            ++st.n;
            st.sum += g.values[i];
            st.sumsq += g.values[i] * g.values[i];
        }

    int64_t boundary = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int64_t i = static_cast<int64_t>(y) * w + x;
            if (!m.valid[i]) continue;
            if (x + 1 < w && m.valid[i + 1] && labels[i + 1] != labels[i]) ++boundary;
            if (y + 1 < h && m.valid[i + w] && labels[i + w] != labels[i]) ++boundary;
        }

    double objective = -p.compactness * static_cast<double>(boundary);
    for (const auto& st : stats) objective += log_likelihood(st);
    if (objective_trace) {
        objective_trace->clear();
        objective_trace->push_back(objective);
    }

    auto label_at = [&](int x, int y) -> uint32_t {
        if (x < 0 || y < 0 || x >= w || y >= h) return kInvalidSegment;
        const int64_t i = static_cast<int64_t>(y) * w + x;
        return m.valid[i] ? labels[i] : kInvalidSegment;
    };

    // Does removing pixel i keep segment a connected? Flood within a from a
    // neighboring a-pixel must reach n-1 pixels.
    std::vector<uint8_t> seen(labels.size(), 0);
    std::vector<int64_t> stack, seen_list;
    auto removal_keeps_connected = [&](int64_t i, uint32_t a) {
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        int64_t anchor = -1;
        for (int d = 0; d < 4 && anchor < 0; ++d) {
            const int nx = x + kDx[d], ny = y + kDy[d];
            if (label_at(nx, ny) == a) anchor = static_cast<int64_t>(ny) * w + nx;
        }
        if (anchor < 0) return false;  // no neighbor in a: removal must be forbidden
        seen_list.clear();
        stack.assign(1, anchor);
        seen[anchor] = 1;
        seen[i] = 2;  // treat the candidate as removed
        seen_list.push_back(anchor);
        int64_t reached = 0;
        while (!stack.empty()) {
            const int64_t j = stack.back();
            stack.pop_back();
            ++reached;
            const int jx = static_cast<int>(j % w), jy = static_cast<int>(j / w);
            for (int d = 0; d < 4; ++d) {
                const int nx = jx + kDx[d], ny = jy + kDy[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const int64_t nj = static_cast<int64_t>(ny) * w + nx;
                if (seen[nj] || !m.valid[nj] || labels[nj] != a) continue;
                seen[nj] = 1;
                seen_list.push_back(nj);
                stack.push_back(nj);
            }
        }
        for (const int64_t j : seen_list) seen[j] = 0;
        seen[i] = 0;
        return reached == stats[a].n - 1;
    };

    for (int sweep = 0; sweep < p.iterations; ++sweep) {
        bool changed = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int64_t i = static_cast<int64_t>(y) * w + x;
                if (!m.valid[i]) continue;
                const uint32_t a = labels[i];
                // candidate labels among the 4-neighbors
                uint32_t cands[4];
                int ncand = 0;
                int same_neighbors = 0;
                for (int d = 0; d < 4; ++d) {
                    const uint32_t l = label_at(x + kDx[d], y + kDy[d]);
                    if (l == kInvalidSegment) continue;
                    if (l == a) {
                        ++same_neighbors;
                        continue;
                    }
                    bool dup = false;
                    for (int c = 0; c < ncand; ++c) dup |= cands[c] == l;
                    if (!dup) cands[ncand++] = l;
                }
                if (ncand == 0) continue;
                if (stats[a].n <= 1) continue;           // never empty a segment
                if (!removal_keeps_connected(i, a)) continue;

                std::sort(cands, cands + ncand);
                const double v = g.values[i];
                const SegStats& sa = stats[a];
                const SegStats a_after{sa.n - 1, sa.sum - v, sa.sumsq - v * v};
                const double ll_a = log_likelihood(sa), ll_a_after = log_likelihood(a_after);

                double best_gain = 0;
                uint32_t best_b = kInvalidSegment;
                int best_diff_nb = 0;
                for (int c = 0; c < ncand; ++c) {
                    const uint32_t b = cands[c];
                    const SegStats& sb = stats[b];
                    const SegStats b_after{sb.n + 1, sb.sum + v, sb.sumsq + v * v};
                    // boundary delta from this pixel's own crossing edges
                    int nb_b = 0;
                    for (int d = 0; d < 4; ++d) {
                        const uint32_t l = label_at(x + kDx[d], y + kDy[d]);
                        if (l == b) ++nb_b;
                    }
                    const int d_boundary = same_neighbors - nb_b;
                    const double gain = ll_a_after + log_likelihood(b_after) - ll_a -
                                        log_likelihood(sb) -
                                        p.compactness * static_cast<double>(d_boundary);
                    // candidates ascend, so ties keep the smaller label
                    if (gain > 0 && gain > best_gain) {
                        best_gain = gain;
                        best_b = b;
                        best_diff_nb = d_boundary;
                    }
                }
                if (best_b == kInvalidSegment) continue;

                labels[i] = best_b;
                stats[a].n -= 1;
                stats[a].sum -= v;
                stats[a].sumsq -= v * v;
                stats[best_b].n += 1;
                stats[best_b].sum += v;
                stats[best_b].sumsq += v * v;
                boundary += best_diff_nb;
                objective += best_gain;
                changed = true;
            }
        if (objective_trace) objective_trace->push_back(objective);
        if (!changed) break;
    }

    return detail::finalize_segmentation(std::move(labels), m, p.resolved_min_size(nvalid));
}

}  // namespace spx
