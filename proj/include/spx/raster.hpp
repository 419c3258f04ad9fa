#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spx {

// Label codes shared by LabelMap and the flat-binary u8 format.
inline constexpr uint8_t kLabelForest = 0;
inline constexpr uint8_t kLabelDeforestation = 1;
inline constexpr uint8_t kLabelInvalid = 255;

// Multiband image, band-sequential row-major storage.
// data[b * width * height + y * width + x] is band b at pixel (x, y).
struct Raster {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<float> data;
    std::vector<std::string> band_names;  // empty or one name per band

    int64_t pixel_count() const { return static_cast<int64_t>(width) * height; }
    const float* band(int b) const { return data.data() + static_cast<int64_t>(b) * pixel_count(); }
    float* band(int b) { return data.data() + static_cast<int64_t>(b) * pixel_count(); }
    float at(int b, int x, int y) const { return band(b)[static_cast<int64_t>(y) * width + x]; }

    // Throws Error when dimensions, sample counts or finiteness are violated.
    void validate() const;
    // Index of the named band, or throws Error listing the known names.
    int band_index(const std::string& name) const;
};

struct Mask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> valid;  // 0 or 1 per pixel, row-major

    bool at(int x, int y) const { return valid[static_cast<int64_t>(y) * width + x] != 0; }
    int64_t valid_count() const;
    void validate() const;
};

// Full-mask convenience used by callers without an exclusion map.
Mask full_mask(int width, int height);

// Single-band real image, the segmentation substrate.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    double at(int x, int y) const { return values[static_cast<int64_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<int64_t>(y) * width + x]; }
};

// Reference class map: kLabelForest / kLabelDeforestation / kLabelInvalid.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> labels;  // row-major

    uint8_t at(int x, int y) const { return labels[static_cast<int64_t>(y) * width + x]; }
    void validate() const;
    // Checks that invalid labels sit exactly on mask-invalid pixels.
    void validate_against(const Mask& mask) const;
};

// First principal component of the band vectors over mask-valid pixels.
// Statistics (mean, covariance) use valid pixels only; the eigenvector sign
// is fixed so its largest-magnitude entry is positive; output is rescaled
// linearly to [0,1] over valid pixels. Invalid pixels are set to 0.
// Throws Error when fewer than 2 valid pixels exist or all bands have zero
// variance.
GrayImage pca_first_component(const Raster& r, const Mask& m);

// Sub-raster with the named bands in the requested order. Sample values are
// passed through bit-identically.
Raster select_bands(const Raster& r, const std::vector<std::string>& names);

}  // namespace spx
