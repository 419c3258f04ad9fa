#pragma once

#include <cstdint>

#include "spx/raster.hpp"

namespace spx {

// Deterministic synthetic scenes for demos and tests: textured "forest"
// against smoother "deforestation" regions, two bands, optional mask cutout.
struct SynthOptions {
    enum class Layout {
        uniform,    // single class, flat intensity
        two_tone,   // vertical split, forest left / deforestation right
        blobs       // smooth deforestation patches in textured forest
    };
    Layout layout = Layout::blobs;
    int width = 256;
    int height = 256;
    uint64_t seed = 0;
    int blobs = 3;
    double forest_noise = 0.22;    // per-pixel texture amplitude in forest
    double clearing_noise = 0.02;  // amplitude inside deforestation
    bool masked = false;           // carve an invalid border and a disk
};

struct SyntheticScene {
    Raster raster;  // bands B1, B2
    Mask mask;
    LabelMap labels;
};

SyntheticScene synth_scene(const SynthOptions& opt);

}  // namespace spx
