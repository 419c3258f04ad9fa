#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spx/raster.hpp"
#include "spx/superpixel.hpp"

namespace spx {

// Per-segment class statistics under the reference label map.
struct SegmentRecord {
    uint32_t segment_id = 0;
    std::string method;
    int area_id = 0;
    int64_t pixel_count = 0;              // segment area in pixels
    double forest_fraction = 0;           // over pixels with a class label
    double deforestation_fraction = 0;
    uint8_t dominant_class = kLabelForest;  // ties go to forest
    double homogeneity = 0;               // max of the fractions
    bool usable = true;                   // false: no labeled pixel in segment
};

// One record per segment, fractions over labeled pixels only. Segments whose
// pixels all fall on invalid labels are flagged unusable.
std::vector<SegmentRecord> segment_stats(const Segmentation& s, const LabelMap& l);

// Strict thresholds, matching "more than": keeps usable records with
// pixel_count > min_pixels and homogeneity > min_homog.
std::vector<SegmentRecord> filter_useful(const std::vector<SegmentRecord>& records,
                                         int64_t min_pixels = 70, double min_homog = 0.70);

struct SegmentKey {
    int area_id = 0;
    uint32_t segment_id = 0;
    auto operator<=>(const SegmentKey&) const = default;
};

struct SplitManifest {
    std::string method;
    std::vector<SegmentKey> train_forest;
    std::vector<SegmentKey> train_deforestation;
    std::vector<SegmentKey> test_ids;
    // provenance
    int64_t min_pixels = 70;
    double min_homog = 0.70;
    int n_pure = 45;
    int n_mixed = 45;
    uint64_t seed = 0;
};

// Builds the train/test split from useful records: per class, n_pure
// segments drawn uniformly (seeded) from those with homogeneity exactly 1,
// plus the n_mixed lowest-homogeneity survivors in ascending homogeneity
// order (ties: larger pixel_count, then smaller (area, id)). Everything else
// becomes the test set. Throws Error naming the deficit when a stratum is
// too small.
SplitManifest build_training_set(const std::vector<SegmentRecord>& records, int n_pure,
                                 int n_mixed, uint64_t seed);

void save_manifest(const std::string& path, const SplitManifest& m);
SplitManifest load_manifest(const std::string& path);

// Cross-method segment correspondence by largest pixel overlap.
struct MatchResult {
    std::vector<uint32_t> ref_ids;
    // matched[i] is the `other` segment with the largest overlap with
    // ref_ids[i] (ties: larger other segment, then smaller id), or
    // kInvalidSegment when they never overlap.
    std::vector<uint32_t> matched;
    std::vector<int64_t> overlap;  // overlapping pixel count per entry
    bool injective = true;
};

MatchResult match_segments(const Segmentation& ref, const Segmentation& other,
                           const std::vector<uint32_t>& ids);

}  // namespace spx
