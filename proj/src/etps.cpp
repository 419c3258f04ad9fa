#include <algorithm>
#include <cmath>
#include <vector>

#include "spx/superpixel.hpp"
#include "superpixel_internal.hpp"

namespace spx {

using detail::kDx;
using detail::kDy;

namespace {

struct SegStats {
    int64_t n = 0;
    double sum = 0, sumsq = 0;
    // Sum of squared deviations from the segment mean.
    double scatter() const {
        if (n == 0) return 0.0;
        const double s = sumsq - sum * sum / static_cast<double>(n);
        return s > 0.0 ? s : 0.0;
    }
};

// Valid-valid 4-adjacent pairs with differing labels.
int64_t boundary_length(const std::vector<uint32_t>& labels, const Mask& m) {
    int64_t b = 0;
    const int w = m.width, h = m.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int64_t i = static_cast<int64_t>(y) * w + x;
            if (!m.valid[i]) continue;
            if (x + 1 < w && m.valid[i + 1] && labels[i + 1] != labels[i]) ++b;
            if (y + 1 < h && m.valid[i + w] && labels[i + w] != labels[i]) ++b;
        }
    return b;
}

}  // namespace

Segmentation etps(const GrayImage& g, const Mask& m, const SuperpixelParams& p,
                  std::vector<double>* energy_trace) {
    detail::check_superpixel_inputs(g, m, p);
    const int w = g.width, h = g.height;
    const int64_t nvalid = m.valid_count();
    const double S = std::sqrt(static_cast<double>(nvalid) / p.k_target);

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

    double energy = 0;
    for (const auto& st : stats) energy += st.scatter();
    energy += p.compactness * static_cast<double>(boundary_length(labels, m));
    if (energy_trace) {
        energy_trace->clear();
        energy_trace->push_back(energy);
    }

    auto label_at = [&](int x, int y) -> uint32_t {
        if (x < 0 || y < 0 || x >= w || y >= h) return kInvalidSegment;
        const int64_t i = static_cast<int64_t>(y) * w + x;
        return m.valid[i] ? labels[i] : kInvalidSegment;
    };

    // Connectivity of segment A after removing the block (block pixels are
    // flagged in `removed`). Flood from `anchor`, an A pixel outside the block.
    std::vector<uint8_t> removed(labels.size(), 0);
    std::vector<int64_t> stack;
    auto still_connected = [&](uint32_t a, int64_t anchor, int64_t remaining) {
        std::vector<int64_t> seen_list;
        std::vector<uint8_t>& seen = removed;  // reuse: mark visited as 2
        stack.assign(1, anchor);
        seen[anchor] = 2;
        seen_list.push_back(anchor);
        int64_t reached = 0;
        while (!stack.empty()) {
            const int64_t i = stack.back();
            stack.pop_back();
            ++reached;
            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
            for (int d = 0; d < 4; ++d) {
                const int nx2 = x + kDx[d], ny2 = y + kDy[d];
                if (nx2 < 0 || ny2 < 0 || nx2 >= w || ny2 >= h) continue;
                const int64_t ni = static_cast<int64_t>(ny2) * w + nx2;
                if (!m.valid[ni] || labels[ni] != a || seen[ni] != 0) continue;
                seen[ni] = 2;
                seen_list.push_back(ni);
                stack.push_back(ni);
            }
        }
        for (const int64_t i : seen_list) seen[i] = seen[i] == 2 ? 0 : seen[i];
        return reached == remaining;
    };

    int block = 1;
    while (block * 2 <= static_cast<int>(S / 2)) block *= 2;

    std::vector<int64_t> block_pixels;
    for (; block >= 1; block /= 2) {
        for (int sweep = 0; sweep < p.iterations; ++sweep) {
            bool changed = false;
            for (int by = 0; by < h; by += block)
                for (int bx = 0; bx < w; bx += block) {
                    // Gather the block's valid pixels; all must share a label.
                    block_pixels.clear();
                    uint32_t a = kInvalidSegment;
                    bool uniform = true;
                    for (int y = by; y < std::min(by + block, h) && uniform; ++y)
                        for (int x = bx; x < std::min(bx + block, w); ++x) {
                            const int64_t i = static_cast<int64_t>(y) * w + x;
                            if (!m.valid[i]) continue;
                            if (a == kInvalidSegment) a = labels[i];
                            else if (labels[i] != a) {
                                uniform = false;
                                break;
                            }
                            block_pixels.push_back(i);
                        }
                    if (!uniform || block_pixels.empty()) continue;
                    if (static_cast<int64_t>(block_pixels.size()) == stats[a].n) continue;

                    // The block itself must be connected to stay mergeable.
                    if (block > 1) {
                        for (const int64_t i : block_pixels) removed[i] = 1;
                        const int64_t first = block_pixels.front();
                        stack.assign(1, first);
                        removed[first] = 3;
                        int64_t reached = 0;
                        while (!stack.empty()) {
                            const int64_t i = stack.back();
                            stack.pop_back();
                            ++reached;
                            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                            for (int d = 0; d < 4; ++d) {
                                const int nx2 = x + kDx[d], ny2 = y + kDy[d];
                                if (nx2 < 0 || ny2 < 0 || nx2 >= w || ny2 >= h) continue;
                                const int64_t ni = static_cast<int64_t>(ny2) * w + nx2;
                                if (removed[ni] == 1) {
                                    removed[ni] = 3;
                                    stack.push_back(ni);
                                }
                            }
                        }
                        const bool block_connected = reached == static_cast<int64_t>(block_pixels.size());
                        for (const int64_t i : block_pixels) removed[i] = 0;
                        if (!block_connected) continue;
                    }

                    // Candidate target segments and the boundary delta per move.
                    double sum_b = 0, sumsq_b = 0;
                    for (const int64_t i : block_pixels) {
                        sum_b += g.values[i];
                        sumsq_b += g.values[i] * g.values[i];
                    }
                    const auto nb = static_cast<int64_t>(block_pixels.size());

                    std::vector<uint32_t> cands;
                    for (const int64_t i : block_pixels) removed[i] = 1;
                    int64_t cross_a = 0;  // block edges to non-block A pixels
                    std::vector<std::pair<uint32_t, int64_t>> cross_other;
                    for (const int64_t i : block_pixels) {
                        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                        for (int d = 0; d < 4; ++d) {
                            const uint32_t l = label_at(x + kDx[d], y + kDy[d]);
                            if (l == kInvalidSegment) continue;
                            const int64_t ni = static_cast<int64_t>(y + kDy[d]) * w + (x + kDx[d]);
                            if (removed[ni]) continue;  // inside block
                            if (l == a) {
                                ++cross_a;
                            } else {
                                bool found = false;
                                for (auto& [cl, cnt] : cross_other)
                                    if (cl == l) {
                                        ++cnt;
                                        found = true;
                                        break;
                                    }
                                if (!found) cross_other.emplace_back(l, 1);
                            }
                        }
                    }
                    for (const int64_t i : block_pixels) removed[i] = 0;
                    if (cross_other.empty()) continue;
                    std::sort(cross_other.begin(), cross_other.end());

                    int64_t cross_total = cross_a;
                    for (const auto& [cl, cnt] : cross_other) cross_total += cnt;

                    const SegStats& sa = stats[a];
                    SegStats a_after{sa.n - nb, sa.sum - sum_b, sa.sumsq - sumsq_b};

                    double best_delta = 0;
                    uint32_t best_target = kInvalidSegment;
                    for (const auto& [bl, cnt] : cross_other) {
                        const SegStats& sb = stats[bl];
                        SegStats b_after{sb.n + nb, sb.sum + sum_b, sb.sumsq + sumsq_b};
                        const double d_scatter = a_after.scatter() + b_after.scatter() -
                                                 sa.scatter() - sb.scatter();
                        // after the move, edges to B no longer cross; edges to A do
                        const int64_t d_boundary = (cross_total - cnt) - (cross_total - cross_a);
                        const double delta =
                            d_scatter + p.compactness * static_cast<double>(d_boundary);
                        if (delta < best_delta) {
                            best_delta = delta;
                            best_target = bl;
                        }
                    }
                    if (best_target == kInvalidSegment) continue;

                    // Connectivity of A without the block.
                    for (const int64_t i : block_pixels) removed[i] = 1;
                    int64_t anchor = -1;
                    for (const int64_t i : block_pixels) {
                        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
                        for (int d = 0; d < 4 && anchor < 0; ++d) {
                            const int nx2 = x + kDx[d], ny2 = y + kDy[d];
                            if (nx2 < 0 || ny2 < 0 || nx2 >= w || ny2 >= h) continue;
                            const int64_t ni = static_cast<int64_t>(ny2) * w + nx2;
                            if (m.valid[ni] && labels[ni] == a && !removed[ni]) anchor = ni;
                        }
                        if (anchor >= 0) break;
                    }
                    bool ok = anchor >= 0 && still_connected(a, anchor, stats[a].n - nb);
                    for (const int64_t i : block_pixels) removed[i] = 0;
                    if (!ok) continue;

                    // Apply the move.
                    for (const int64_t i : block_pixels) labels[i] = best_target;
                    stats[a].n -= nb;
                    stats[a].sum -= sum_b;
                    stats[a].sumsq -= sumsq_b;
                    stats[best_target].n += nb;
                    stats[best_target].sum += sum_b;
                    stats[best_target].sumsq += sumsq_b;
                    energy += best_delta;
                    if (energy_trace) energy_trace->push_back(energy);
                    changed = true;
                }
            if (!changed) break;
        }
    }

    return detail::finalize_segmentation(std::move(labels), m, p.resolved_min_size(nvalid));
}

}  // namespace spx
