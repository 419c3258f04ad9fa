#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spx/raster.hpp"

namespace spx {

// Connected partition of the mask-valid pixels. Labels are dense ids
// 0..k_actual-1; masked-out pixels carry kInvalidSegment.
inline constexpr uint32_t kInvalidSegment = 0xFFFFFFFFu;

struct Segmentation {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> labels;  // row-major
    uint32_t k_actual = 0;

    uint32_t at(int x, int y) const { return labels[static_cast<int64_t>(y) * width + x]; }

    // Checks all type invariants: dense nonempty ids, 4-connectivity of each
    // segment, exact alignment of valid pixels with the mask. Throws Error.
    void validate(const Mask& m) const;
};

struct SuperpixelParams {
    int k_target = 100;
    double compactness = 0.2;
    int iterations = 10;
    uint64_t seed = 0;
    // Post-merge floor in pixels. 0 means auto: valid_area / (4 * k_target),
    // clamped to at least 1.
    int min_size = 0;

    int resolved_min_size(int64_t valid_area) const;
};

// The five methods share one contract: gray image and mask must be
// dimension-compatible, 1 <= k_target <= valid pixel count, and the result
// satisfies every Segmentation invariant with k_actual within +-20% of
// k_target after connectivity enforcement.
//
// slic: k-means-style assignment in (intensity, x, y) with
//   d = |dI| + (compactness/S) * ||dxy||, S = sqrt(valid_area/k_target);
//   seeds on a regular grid perturbed to the lowest-gradient pixel in a 3x3
//   window; search window 2Sx2S; masked pixels never assigned.
Segmentation slic(const GrayImage& g, const Mask& m, const SuperpixelParams& p);

// ergc: seeded front propagation ordered by a priority queue over arrival
//   time; step cost = |I(pixel) - mean(region)| + (compactness/S) * distance
//   to the region's seed; each pixel taken by the first-arriving front.
//   arrival_trace, when given, receives the arrival time of every labeling
//   pop in order.
Segmentation ergc(const GrayImage& g, const Mask& m, const SuperpixelParams& p,
                  std::vector<double>* arrival_trace = nullptr);

// etps: regular grid partition refined coarse-to-fine; an aligned block on a
//   segment boundary moves to a neighboring segment when that strictly
//   lowers E = sum of per-segment intensity scatter + compactness * boundary
//   length, and both segments stay 4-connected. energy_trace, when given,
//   receives E after the initial partition and after every accepted move.
Segmentation etps(const GrayImage& g, const Mask& m, const SuperpixelParams& p,
                  std::vector<double>* energy_trace = nullptr);

// rss: seeded shortest-path forest on the 4-neighbor graph. Path cost is
//   compactness * (max edge |dI|) + (max - min intensity along the path),
//   compared lexicographically with (cost, hops, max-edge term, path max,
//   path min); a pixel joins the root minimizing (cost, hops, root id).
Segmentation rss(const GrayImage& g, const Mask& m, const SuperpixelParams& p);

// crs: contour relaxation sweeps over boundary pixels, reassigning a pixel
//   to a neighboring segment when that strictly raises
//   objective = sum of per-segment Gaussian log-likelihood (variance floored
//   at 1e-6) - compactness * boundary length; moves that disconnect or empty
//   a segment are forbidden. objective_trace, when given, receives the
//   objective after the initial partition and after every sweep.
Segmentation crs(const GrayImage& g, const Mask& m, const SuperpixelParams& p,
                 std::vector<double>* objective_trace = nullptr);

// Merges every connected component smaller than min_size into its largest
// adjacent segment and renumbers labels to 0..k_actual-1 in row-major
// first-occurrence order. Total on dimensionally valid input.
Segmentation enforce_connectivity(const Segmentation& s, int min_size);

// Fraction of ground-truth class-boundary pixels that lie within Chebyshev
// distance tol of a segmentation boundary pixel. Returns 1 when the truth
// has no boundary.
double boundary_recall(const Segmentation& s, const LabelMap& truth, int tol = 1);

// ---- shared internals, exposed for the serial reference kernels and tests

// Exactly k seed pixel indices spread over the valid area on a regular grid,
// row-major order. Deterministic.
std::vector<int64_t> grid_seeds(const Mask& m, int k);

// Rectangular-cell partition of the valid area normalized to exactly k
// connected segments (small components merged, large ones split).
std::vector<uint32_t> initial_grid_partition(const Mask& m, int k);

// Persisted segmentation: u32le flat-binary grid plus a text sidecar
// (algorithm, params, k_actual, wall-clock ms, variant note).
struct SegmentationSidecar {
    std::string algorithm;
    SuperpixelParams params;
    uint32_t k_actual = 0;
    double wall_ms = 0.0;
    std::string variant;
};

void save_segmentation(const std::string& header_path, const Segmentation& s);
Segmentation load_segmentation(const std::string& header_path);
void write_sidecar(const std::string& path, const SegmentationSidecar& sc);
SegmentationSidecar read_sidecar(const std::string& path);

// Dispatch by method name ("slic", "ergc", "etps", "rss", "crs").
// Throws UsageError on an unknown name.
Segmentation run_superpixel(const std::string& method, const GrayImage& g, const Mask& m,
                            const SuperpixelParams& p);
const std::vector<std::string>& superpixel_methods();
// One-line description of how this implementation deviates from the
// original publication of the method; recorded in the sidecar.
std::string superpixel_variant_note(const std::string& method);

}  // namespace spx
