#include "spx/texture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spx/error.hpp"
#include "spx/parallel.hpp"

namespace spx {

const std::array<std::string, kNumHaralick>& haralick_names() {
    static const std::array<std::string, kNumHaralick> names{
        "asm",         "contrast",       "correlation",  "variance",
        "idm",         "sum_average",    "sum_variance", "sum_entropy",
        "entropy",     "diff_variance",  "diff_entropy", "imc1",
        "imc2"};
    return names;
}

void glcm_offset(GlcmDirection dir, int distance, int& dx, int& dy) {
    switch (dir) {
        case GlcmDirection::deg0: dx = distance; dy = 0; break;
        case GlcmDirection::deg45: dx = distance; dy = -distance; break;
        case GlcmDirection::deg90: dx = 0; dy = -distance; break;
        case GlcmDirection::deg135: dx = -distance; dy = -distance; break;
    }
}

std::vector<int> quantize(const std::vector<double>& values, int levels) {
    if (levels < 2) throw Error("quantize: need at least 2 levels");
    if (values.empty()) throw Error("quantize: empty input");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<int> out(values.size(), 0);
    if (hi <= lo) return out;  // constant input
    const double scale = levels / (hi - lo);
    for (size_t i = 0; i < values.size(); ++i) {
        const int level = static_cast<int>((values[i] - lo) * scale);
        out[i] = std::min(level, levels - 1);
    }
    return out;
}

namespace {

// Accumulates one segment's GLCM counts into a dense buffer.
// Pixels must be inside `members` (level by position); membership is looked
// up through a span-local index.
struct PatchIndex {
    int x0 = 0, y0 = 0, w = 0, h = 0;
    std::vector<int16_t> level;  // -1 outside the segment

    void build(const SegmentPixels& seg) {
        int x1 = std::numeric_limits<int>::min(), y1 = x1;
        x0 = std::numeric_limits<int>::max();
        y0 = x0;
        for (size_t i = 0; i < seg.size(); ++i) {
            x0 = std::min(x0, seg.x[i]);
            y0 = std::min(y0, seg.y[i]);
            x1 = std::max(x1, seg.x[i]);
            y1 = std::max(y1, seg.y[i]);
        }
        w = x1 - x0 + 1;
        h = y1 - y0 + 1;
        level.assign(static_cast<size_t>(w) * h, -1);
        for (size_t i = 0; i < seg.size(); ++i)
            level[static_cast<size_t>(seg.y[i] - y0) * w + (seg.x[i] - x0)] =
                static_cast<int16_t>(seg.level[i]);
    }

    int at(int x, int y) const {
        const int lx = x - x0, ly = y - y0;
        if (lx < 0 || ly < 0 || lx >= w || ly >= h) return -1;
        return level[static_cast<size_t>(ly) * w + lx];
    }
};

int64_t accumulate_glcm(const SegmentPixels& seg, const PatchIndex& patch, int dx, int dy,
                        int levels, std::vector<int64_t>& counts) {
    std::fill(counts.begin(), counts.end(), 0);
    int64_t pairs = 0;
    for (size_t i = 0; i < seg.size(); ++i) {
        const int a = seg.level[i];
        const int b = patch.at(seg.x[i] + dx, seg.y[i] + dy);
        if (b < 0) continue;
        ++counts[static_cast<size_t>(a) * levels + b];
        ++counts[static_cast<size_t>(b) * levels + a];
        pairs += 2;
    }
    return pairs;
}

}  // namespace

Glcm glcm(const SegmentPixels& seg, GlcmDirection dir, int distance, int levels) {
    if (levels < 2) throw Error("glcm: need at least 2 levels");
    if (seg.size() == 0) throw Error("glcm: empty segment");
    int dx, dy;
    glcm_offset(dir, distance, dx, dy);

    PatchIndex patch;
    patch.build(seg);
    std::vector<int64_t> counts(static_cast<size_t>(levels) * levels);
    const int64_t pairs = accumulate_glcm(seg, patch, dx, dy, levels, counts);

    Glcm g;
    g.levels = levels;
    g.direction = dir;
    g.distance = distance;
    g.pair_count = pairs;
    g.p.assign(counts.size(), 0.0);
    if (pairs > 0) {
        const double norm = 1.0 / static_cast<double>(pairs);
        for (size_t i = 0; i < counts.size(); ++i)
            g.p[i] = static_cast<double>(counts[i]) * norm;
    }
    return g;
}

namespace {

double log2_or_zero(double v) { return v > 0.0 ? std::log2(v) : 0.0; }

std::array<double, kNumHaralick> haralick_from_dense(const std::vector<double>& p, int g) {
    std::vector<double> px(g, 0.0);
    std::vector<double> psum(2 * g - 1, 0.0);  // p_{x+y}
    std::vector<double> pdiff(g, 0.0);         // p_{x-y}

    double asm_ = 0, contrast = 0, idm = 0, entropy = 0, cross = 0;
    for (int i = 0; i < g; ++i) {
        const double* row = p.data() + static_cast<size_t>(i) * g;
        for (int j = 0; j < g; ++j) {
            const double v = row[j];
            if (v == 0.0) {
                // zero cells still shape nothing; skip the transcendentals
                continue;
            }
            px[i] += v;
            psum[i + j] += v;
            pdiff[std::abs(i - j)] += v;
            asm_ += v * v;
            contrast += static_cast<double>((i - j) * (i - j)) * v;
            idm += v / (1.0 + static_cast<double>((i - j) * (i - j)));
            entropy -= v * std::log2(v);
            cross += static_cast<double>(i) * static_cast<double>(j) * v;
        }
    }

    double mu = 0;
    for (int i = 0; i < g; ++i) mu += i * px[i];
    double var_marginal = 0;
    for (int i = 0; i < g; ++i) var_marginal += (i - mu) * (i - mu) * px[i];

    const double correlation =
        var_marginal > 0.0 ? (cross - mu * mu) / var_marginal : 0.0;

    // f4: squared deviation of the level index from the marginal mean
    double variance = 0;
    for (int i = 0; i < g; ++i) {
        const double* row = p.data() + static_cast<size_t>(i) * g;
        for (int j = 0; j < g; ++j)
            if (row[j] != 0.0) variance += (i - mu) * (i - mu) * row[j];
    }

    double sum_avg = 0, sum_entropy = 0;
    for (int k = 0; k < 2 * g - 1; ++k) {
        sum_avg += k * psum[k];
        sum_entropy -= psum[k] * log2_or_zero(psum[k]);
    }
    double sum_var = 0;
    for (int k = 0; k < 2 * g - 1; ++k) sum_var += (k - sum_avg) * (k - sum_avg) * psum[k];

    double diff_mean = 0, diff_entropy = 0;
    for (int k = 0; k < g; ++k) {
        diff_mean += k * pdiff[k];
        diff_entropy -= pdiff[k] * log2_or_zero(pdiff[k]);
    }
    double diff_var = 0;
    for (int k = 0; k < g; ++k) diff_var += (k - diff_mean) * (k - diff_mean) * pdiff[k];

    // information measures; marginals are equal by symmetry
    double hx = 0;
    for (int i = 0; i < g; ++i) hx -= px[i] * log2_or_zero(px[i]);
    double hxy1 = 0, hxy2 = 0;
    for (int i = 0; i < g; ++i) {
        if (px[i] == 0.0) continue;
        const double* row = p.data() + static_cast<size_t>(i) * g;
        for (int j = 0; j < g; ++j) {
            if (px[j] == 0.0) continue;
            const double pq = px[i] * px[j];
            const double lg = std::log2(pq);
            if (row[j] != 0.0) hxy1 -= row[j] * lg;
            hxy2 -= pq * lg;
        }
    }
    const double imc1 = hx > 0.0 ? (entropy - hxy1) / hx : 0.0;
    const double imc2_arg = 1.0 - std::exp(-2.0 * (hxy2 - entropy));
    const double imc2 = imc2_arg > 0.0 ? std::sqrt(imc2_arg) : 0.0;

    return {asm_,    contrast,    correlation,  variance, idm,  sum_avg, sum_var,
            sum_entropy, entropy, diff_var, diff_entropy, imc1, imc2};
}

}  // namespace

std::array<double, kNumHaralick> haralick13(const Glcm& g) {
    if (g.empty())
        throw Error("haralick13: empty GLCM (no co-occurring pair); widen the segment filter");
    return haralick_from_dense(g.p, g.levels);
}

namespace {

struct BandPlane {
    std::vector<int16_t> level;  // -1 on invalid pixels
};

// Quantizes each selected band over its valid-pixel range.
std::vector<BandPlane> quantize_bands(const Raster& r, const Segmentation& s,
                                      const std::vector<std::string>& bands, int levels) {
    const int64_t npix = r.pixel_count();
    std::vector<BandPlane> planes;
    planes.reserve(bands.size());
    for (const auto& name : bands) {
        const int b = r.band_index(name);
        const float* band = r.band(b);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int64_t i = 0; i < npix; ++i) {
            if (s.labels[i] == kInvalidSegment) continue;
            lo = std::min(lo, static_cast<double>(band[i]));
            hi = std::max(hi, static_cast<double>(band[i]));
        }
        BandPlane plane;
        plane.level.assign(static_cast<size_t>(npix), -1);
        const double scale = hi > lo ? levels / (hi - lo) : 0.0;
        for (int64_t i = 0; i < npix; ++i) {
            if (s.labels[i] == kInvalidSegment) continue;
            const int lv = hi > lo
                               ? std::min(static_cast<int>((band[i] - lo) * scale), levels - 1)
                               : 0;
            plane.level[i] = static_cast<int16_t>(lv);
        }
        planes.push_back(std::move(plane));
    }
    return planes;
}

// Nested mean: per band over its non-empty directions, then over bands.
// Returns false when no (band, direction) pair had any co-occurrence.
bool features_for_segment(const SegmentPixels& base, const std::vector<const int16_t*>& levels_by_band,
                          int levels, std::array<double, kNumHaralick>& out,
                          std::vector<int64_t>* counts_buffer, int raster_width) {
    SegmentPixels seg = base;
    PatchIndex patch;
    std::array<double, kNumHaralick> band_acc{};
    int bands_used = 0;
    for (const int16_t* plane : levels_by_band) {
        for (size_t i = 0; i < seg.size(); ++i)
            seg.level[i] = plane[static_cast<int64_t>(seg.y[i]) * raster_width + seg.x[i]];
        patch.build(seg);
        std::array<double, kNumHaralick> dir_acc{};
        int dirs_used = 0;
        for (const GlcmDirection dir : kGlcmDirections) {
            int dx, dy;
            glcm_offset(dir, 1, dx, dy);
            const int64_t pairs = accumulate_glcm(seg, patch, dx, dy, levels, *counts_buffer);
            if (pairs == 0) continue;
            std::vector<double> p(counts_buffer->size());
            const double norm = 1.0 / static_cast<double>(pairs);
            for (size_t i = 0; i < p.size(); ++i)
                p[i] = static_cast<double>((*counts_buffer)[i]) * norm;
            const auto f = haralick_from_dense(p, levels);
            for (int k = 0; k < kNumHaralick; ++k) dir_acc[k] += f[k];
            ++dirs_used;
        }
        if (dirs_used == 0) continue;
        for (int k = 0; k < kNumHaralick; ++k) band_acc[k] += dir_acc[k] / dirs_used;
        ++bands_used;
    }
    if (bands_used == 0) return false;
    for (int k = 0; k < kNumHaralick; ++k) out[k] = band_acc[k] / bands_used;
    return true;
}

}  // namespace

FeatureExtraction segment_features(const Raster& r, const Segmentation& s,
                                   const std::vector<std::string>& bands, int levels) {
    r.validate();
    if (levels < 2) throw Error("segment_features: need at least 2 levels");
    if (bands.empty()) throw Error("segment_features: no bands selected");
    if (r.width != s.width || r.height != s.height)
        throw Error("segment_features: raster and segmentation dimensions differ");

    const auto planes = quantize_bands(r, s, bands, levels);
    std::vector<const int16_t*> plane_ptrs;
    for (const auto& pl : planes) plane_ptrs.push_back(pl.level.data());

    // Gather per-segment pixel lists in row-major order.
    const uint32_t k = s.k_actual;
    std::vector<SegmentPixels> pixels(k);
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
            const uint32_t l = s.at(x, y);
            if (l == kInvalidSegment) continue;
            pixels[l].x.push_back(x);
            pixels[l].y.push_back(y);
            pixels[l].level.push_back(0);
        }

    std::vector<uint8_t> ok(k, 0);
    std::vector<std::array<double, kNumHaralick>> values(k);
    parallel_for(static_cast<int64_t>(k), [&](int64_t seg_id) {
        thread_local std::vector<int64_t> counts;
        counts.assign(static_cast<size_t>(levels) * levels, 0);
        ok[seg_id] = features_for_segment(pixels[seg_id], plane_ptrs, levels, values[seg_id],
                                          &counts, r.width)
                         ? 1
                         : 0;
    });

    FeatureExtraction out;
    for (uint32_t i = 0; i < k; ++i) {
        if (ok[i]) {
            out.features.push_back({i, values[i]});
        } else {
            out.excluded.push_back(i);
        }
    }
    return out;
}

namespace reference {

FeatureExtraction segment_features(const Raster& r, const Segmentation& s,
                                   const std::vector<std::string>& bands, int levels) {
    const auto planes = quantize_bands(r, s, bands, levels);
    std::vector<const int16_t*> plane_ptrs;
    for (const auto& pl : planes) plane_ptrs.push_back(pl.level.data());

    FeatureExtraction out;
    std::vector<int64_t> counts(static_cast<size_t>(levels) * levels);
    for (uint32_t seg_id = 0; seg_id < s.k_actual; ++seg_id) {
        SegmentPixels seg;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x)
                if (s.at(x, y) == seg_id) {
                    seg.x.push_back(x);
                    seg.y.push_back(y);
                    seg.level.push_back(0);
                }
        std::array<double, kNumHaralick> values{};
        if (features_for_segment(seg, plane_ptrs, levels, values, &counts, r.width)) {
            out.features.push_back({seg_id, values});
        } else {
            out.excluded.push_back(seg_id);
        }
    }
    return out;
}

}  // namespace reference

}  // namespace spx
