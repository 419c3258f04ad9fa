#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spx/raster.hpp"
#include "spx/superpixel.hpp"

namespace spx {

inline constexpr int kNumHaralick = 13;

// Canonical feature order used everywhere (CSV columns f01..f13):
// ASM, contrast, correlation, variance, inverse difference moment,
// sum average, sum variance, sum entropy, entropy, difference variance,
// difference entropy, information measures of correlation 1 and 2.
const std::array<std::string, kNumHaralick>& haralick_names();

enum class GlcmDirection { deg0 = 0, deg45 = 1, deg90 = 2, deg135 = 3 };
inline constexpr GlcmDirection kGlcmDirections[4] = {
    GlcmDirection::deg0, GlcmDirection::deg45, GlcmDirection::deg90, GlcmDirection::deg135};

// Pixel offset of a direction at distance 1 (y grows downward).
void glcm_offset(GlcmDirection dir, int distance, int& dx, int& dy);

// Symmetric normalized co-occurrence matrix of one segment. pair_count == 0
// marks the empty GLCM (no co-occurring pair); that is a value, not an error.
struct Glcm {
    int levels = 0;
    GlcmDirection direction = GlcmDirection::deg0;
    int distance = 1;
    int64_t pair_count = 0;            // symmetrized count (2x ordered pairs)
    std::vector<double> p;             // levels x levels, row-major, sums to 1

    bool empty() const { return pair_count == 0; }
    double at(int i, int j) const { return p[static_cast<size_t>(i) * levels + j]; }
};

// Linear binning of [min(values), max(values)] into `levels` bins; callers
// pass the whole band so the range is global, not per segment. A constant
// input maps everything to level 0.
std::vector<int> quantize(const std::vector<double>& values, int levels);

// One segment's pixels with their quantized levels.
struct SegmentPixels {
    std::vector<int> x, y, level;
    size_t size() const { return x.size(); }
};

// Counts every ordered pixel pair of the segment offset by the direction
// vector with both endpoints inside the segment, symmetrized and normalized.
Glcm glcm(const SegmentPixels& seg, GlcmDirection dir, int distance, int levels);

// The 13 Haralick statistics. Logarithms are base 2 with 0*log0 := 0;
// correlation is 0 when a marginal variance vanishes. Throws Error on an
// empty GLCM (callers should widen the segment filter).
std::array<double, kNumHaralick> haralick13(const Glcm& g);

struct SegmentFeatures {
    uint32_t segment_id = 0;
    std::array<double, kNumHaralick> values{};
};

struct FeatureExtraction {
    std::vector<SegmentFeatures> features;  // ascending segment id
    std::vector<uint32_t> excluded;         // segments with no co-occurring pair
};

// Per-segment features: haralick13 for every (band, direction) pair, then
// the mean over directions within each band and over bands. Bands default to
// the caller's list; direction means skip empty GLCMs, and a segment with no
// pair anywhere lands in `excluded`. Runs the per-segment work in parallel;
// output order is segment-id order regardless of scheduling.
FeatureExtraction segment_features(const Raster& r, const Segmentation& s,
                                   const std::vector<std::string>& bands, int levels);

namespace reference {
// Naive serial path: rescans the raster per segment and averages the same
// way. Kept for kernel-equality tests and the benchmark.
FeatureExtraction segment_features(const Raster& r, const Segmentation& s,
                                   const std::vector<std::string>& bands, int levels);
}  // namespace reference

}  // namespace spx
