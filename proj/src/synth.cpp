#include "spx/synth.hpp"

#include <cmath>
#include <vector>

#include "spx/error.hpp"
#include "spx/rng.hpp"

namespace spx {

namespace {

// Position-hashed noise in [-1, 1]; independent of evaluation order.
double pixel_noise(uint64_t seed, int x, int y, int channel) {
    uint64_t h = derive_seed(seed, static_cast<uint64_t>(x) << 32 | static_cast<uint32_t>(y),
                             static_cast<uint64_t>(channel));
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace

SyntheticScene synth_scene(const SynthOptions& opt) {
    if (opt.width < 8 || opt.height < 8) throw Error("synth: scene too small");
    const int w = opt.width, h = opt.height;
    const int64_t n = static_cast<int64_t>(w) * h;

    SyntheticScene scene;
    scene.mask.width = w;
    scene.mask.height = h;
    scene.mask.valid.assign(n, 1);
    if (opt.masked) {
        // invalid border plus one invalid disk, the "already deforested"
        // exclusion shape
        const int border = std::max(2, w / 32);
        const double cx = w * 0.78, cy = h * 0.24, rad = w * 0.12;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const bool in_border =
                    x < border || y < border || x >= w - border || y >= h - border;
                const double dx = x - cx, dy = y - cy;
                if (in_border || dx * dx + dy * dy < rad * rad)
                    scene.mask.valid[static_cast<int64_t>(y) * w + x] = 0;
            }
    }

    // Deforestation geometry. The reference labels follow the smooth blob
    // field; the image texture follows a ragged version of it, so the
    // class boundary and the visual boundary disagree locally (as PRODES
    // polygons do against the imagery) and boundary segments span the whole
    // homogeneity range.
    std::vector<uint8_t> defo_label(n, 0), defo_texture(n, 0);
    if (opt.layout == SynthOptions::Layout::two_tone) {
        for (int y = 0; y < h; ++y)
            for (int x = w / 2; x < w; ++x) {
                defo_label[static_cast<int64_t>(y) * w + x] = 1;
                defo_texture[static_cast<int64_t>(y) * w + x] = 1;
            }
    } else if (opt.layout == SynthOptions::Layout::blobs) {
        Rng rng(derive_seed(opt.seed, 0xB10B5));
        std::vector<double> bx(opt.blobs), by(opt.blobs), br(opt.blobs);
        for (int b = 0; b < opt.blobs; ++b) {
            bx[b] = rng.next_uniform(0.15, 0.85) * w;
            by[b] = rng.next_uniform(0.15, 0.85) * h;
            br[b] = rng.next_uniform(0.10, 0.18) * w;
        }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double field = 0;
                for (int b = 0; b < opt.blobs; ++b) {
                    const double dx = (x - bx[b]) / br[b], dy = (y - by[b]) / br[b];
                    field += std::exp(-(dx * dx + dy * dy));
                }
                const int64_t i = static_cast<int64_t>(y) * w + x;
                if (field > 0.55) defo_label[i] = 1;
                const double ragged = 0.12 * pixel_noise(opt.seed, x >> 3, y >> 3, 7);
                if (field > 0.55 + ragged) defo_texture[i] = 1;
            }
    }

    scene.labels.width = w;
    scene.labels.height = h;
    scene.labels.labels.assign(n, kLabelForest);
    for (int64_t i = 0; i < n; ++i) {
        if (!scene.mask.valid[i]) scene.labels.labels[i] = kLabelInvalid;
        else if (defo_label[i]) scene.labels.labels[i] = kLabelDeforestation;
    }

    scene.raster.width = w;
    scene.raster.height = h;
    scene.raster.bands = 2;
    scene.raster.band_names = {"B1", "B2"};
    scene.raster.data.assign(static_cast<size_t>(n) * 2, 0.0f);
    const double base_forest[2] = {0.62, 0.55};
    const double base_defo[2] = {0.33, 0.40};
    for (int band = 0; band < 2; ++band) {
        float* plane = scene.raster.band(band);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int64_t i = static_cast<int64_t>(y) * w + x;
                const bool d = defo[i] != 0;
                const double base = d ? base_defo[band] : base_forest[band];
                const double amp = d ? opt.clearing_noise : opt.forest_noise;
                double v = base + amp * pixel_noise(opt.seed, x, y, band);
                if (opt.layout == SynthOptions::Layout::uniform) v = 0.5;
                plane[i] = static_cast<float>(v);
            }
    }
    return scene;
}

}  // namespace spx
