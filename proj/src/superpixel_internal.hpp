#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spx/raster.hpp"
#include "spx/superpixel.hpp"

// Helpers shared by the five algorithm translation units.
namespace spx::detail {

inline constexpr int kDx[4] = {0, -1, 1, 0};
inline constexpr int kDy[4] = {-1, 0, 0, 1};

// Common precondition block for the five algorithms.
void check_superpixel_inputs(const GrayImage& g, const Mask& m, const SuperpixelParams& p);

// Assigns any unlabeled valid pixels from their nearest labeled neighbor by
// multi-source BFS (unreached components become fresh labels), then runs
// enforce_connectivity. Every algorithm funnels its raw label grid through
// here so the output invariants hold uniformly.
Segmentation finalize_segmentation(std::vector<uint32_t> labels, const Mask& m, int min_size);

// Grid geometry used by seeding and the initial partitions: ny rows and nx
// columns over the valid-area bounding box with nx*ny ~ k.
struct GridShape {
    int nx = 1, ny = 1;
    int x0 = 0, y0 = 0;  // bbox origin
    int bw = 1, bh = 1;  // bbox extent
};
GridShape grid_shape(const Mask& m, int k);

// ---- SLIC pieces shared between the OpenMP kernel and the serial reference.

struct SlicCenter {
    double intensity = 0, x = 0, y = 0;
};

// Window predicate and distance in one place so every caller computes the
// exact same floating-point value. Returns false outside the 2Sx2S window.
inline bool slic_distance(const SlicCenter& c, double intensity, double px, double py, double S,
                          double spatial_weight, double* out) {
    const double dx = px - c.x;
    const double dy = py - c.y;
    if (dx > S || dx < -S || dy > S || dy < -S) return false;
    *out = (intensity > c.intensity ? intensity - c.intensity : c.intensity - intensity) +
           spatial_weight * std::sqrt(dx * dx + dy * dy);
    return true;
}

// Integer pixel box containing the window of center c.
struct WindowBox {
    int x0, x1, y0, y1;  // inclusive
};
inline WindowBox slic_window(const SlicCenter& c, double S, int w, int h) {
    WindowBox b;
    b.x0 = std::max(0, static_cast<int>(std::floor(c.x - S)));
    b.x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + S)));
    b.y0 = std::max(0, static_cast<int>(std::floor(c.y - S)));
    b.y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + S)));
    return b;
}

std::vector<SlicCenter> slic_init_centers(const GrayImage& g, const Mask& m, int k);

// Recomputes each center as the mean (intensity, x, y) of its members,
// scanning the window around the previous center in row-major order.
void slic_update_centers(const GrayImage& g, const Mask& m, const std::vector<uint32_t>& labels,
                         std::vector<SlicCenter>& centers, double S);

// OpenMP assignment kernel: per-pixel argmin over nearby centers,
// ties to the smaller center id. Unreachable pixels stay kInvalidSegment.
void slic_assign(const GrayImage& g, const Mask& m, const std::vector<SlicCenter>& centers,
                 double S, double spatial_weight, std::vector<uint32_t>& labels);

}  // namespace spx::detail
