#include "spx/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spx/error.hpp"

namespace spx {

void Raster::validate() const {
    if (width < 1 || height < 1 || bands < 1)
        throw Error("raster: dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(bands));
    const auto expected = static_cast<size_t>(pixel_count()) * bands;
    if (data.size() != expected)
        throw Error("raster: sample count " + std::to_string(data.size()) + " does not match " +
                    std::to_string(expected));
    if (!band_names.empty() && band_names.size() != static_cast<size_t>(bands))
        throw Error("raster: " + std::to_string(band_names.size()) + " band names for " +
                    std::to_string(bands) + " bands");
    for (size_t i = 0; i < data.size(); ++i)
        if (!std::isfinite(data[i]))
            throw Error("raster: non-finite sample at index " + std::to_string(i));
}

int Raster::band_index(const std::string& name) const {
    for (size_t i = 0; i < band_names.size(); ++i)
        if (band_names[i] == name) return static_cast<int>(i);
    std::string known;
    for (const auto& n : band_names) known += (known.empty() ? "" : ",") + n;
    throw Error("raster: unknown band \"" + name + "\" (have: " + known + ")");
}

int64_t Mask::valid_count() const {
    int64_t n = 0;
    for (uint8_t v : valid) n += (v != 0);
    return n;
}

void Mask::validate() const {
    if (width < 1 || height < 1) throw Error("mask: dimensions must be positive");
    if (valid.size() != static_cast<size_t>(width) * height)
        throw Error("mask: pixel count mismatch");
    for (uint8_t v : valid)
        if (v > 1) throw Error("mask: values must be 0 or 1, got " + std::to_string(v));
    if (valid_count() == 0) throw Error("mask: no valid pixels");
}

Mask full_mask(int width, int height) {
    Mask m;
    m.width = width;
    m.height = height;
    m.valid.assign(static_cast<size_t>(width) * height, 1);
    return m;
}

void LabelMap::validate() const {
    if (width < 1 || height < 1) throw Error("label map: dimensions must be positive");
    if (labels.size() != static_cast<size_t>(width) * height)
        throw Error("label map: pixel count mismatch");
    for (uint8_t v : labels)
        if (v != kLabelForest && v != kLabelDeforestation && v != kLabelInvalid)
            throw Error("label map: unknown class code " + std::to_string(v));
}

void LabelMap::validate_against(const Mask& mask) const {
    if (width != mask.width || height != mask.height)
        throw Error("label map: dimensions do not match mask");
    for (size_t i = 0; i < labels.size(); ++i) {
        const bool invalid_label = labels[i] == kLabelInvalid;
        const bool invalid_mask = mask.valid[i] == 0;
        if (invalid_label != invalid_mask)
            throw Error("label map: invalid class does not align with mask at pixel " +
                        std::to_string(i));
    }
}

namespace {

// Largest eigenpair of a symmetric positive semi-definite matrix by cyclic
// Jacobi rotations. Small dimension (band count), so the dense sweep is fine.
void jacobi_largest_eigenvector(std::vector<double> a, int n, std::vector<double>& eigvec) {
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

    auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
    auto V = [&](int i, int j) -> double& { return v[static_cast<size_t>(i) * n + j]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (A(p, q) == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i < n; ++i)
        if (A(i, i) > A(best, best)) best = i;
    eigvec.assign(n, 0.0);
    for (int i = 0; i < n; ++i) eigvec[i] = V(i, best);
}

}  // namespace

GrayImage pca_first_component(const Raster& r, const Mask& m) {
    r.validate();
    m.validate();
    if (r.width != m.width || r.height != m.height)
        throw Error("pca: raster and mask dimensions differ");
    const int64_t npix = r.pixel_count();
    const int64_t nvalid = m.valid_count();
    if (nvalid < 2) throw Error("pca: need at least 2 valid pixels, have " + std::to_string(nvalid));

    const int nb = r.bands;
    std::vector<double> mean(nb, 0.0);
    for (int b = 0; b < nb; ++b) {
        const float* band = r.band(b);
        double s = 0.0;
        for (int64_t i = 0; i < npix; ++i)
            if (m.valid[i]) s += band[i];
        mean[b] = s / static_cast<double>(nvalid);
    }

    // Covariance over valid pixels (population normalization; only the
    // eigenvector direction matters).
    std::vector<double> cov(static_cast<size_t>(nb) * nb, 0.0);
    for (int b1 = 0; b1 < nb; ++b1) {
        const float* x = r.band(b1);
        for (int b2 = b1; b2 < nb; ++b2) {
            const float* y = r.band(b2);
            double s = 0.0;
            for (int64_t i = 0; i < npix; ++i)
                if (m.valid[i]) s += (x[i] - mean[b1]) * (y[i] - mean[b2]);
            s /= static_cast<double>(nvalid);
            cov[static_cast<size_t>(b1) * nb + b2] = s;
            cov[static_cast<size_t>(b2) * nb + b1] = s;
        }
    }
    double trace = 0.0;
    for (int b = 0; b < nb; ++b) trace += cov[static_cast<size_t>(b) * nb + b];
    if (trace <= 0.0) throw Error("pca: zero variance in all bands (degenerate input)");

    std::vector<double> w;
    jacobi_largest_eigenvector(cov, nb, w);

    // Sign rule: make the largest-magnitude component positive.
    int big = 0;
    for (int b = 1; b < nb; ++b)
        if (std::abs(w[b]) > std::abs(w[big])) big = b;
    if (w[big] < 0)
        for (auto& c : w) c = -c;

    GrayImage g;
    g.width = r.width;
    g.height = r.height;
    g.values.assign(static_cast<size_t>(npix), 0.0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int64_t i = 0; i < npix; ++i) {
        if (!m.valid[i]) continue;
        double p = 0.0;
        for (int b = 0; b < nb; ++b) p += (r.band(b)[i] - mean[b]) * w[b];
        g.values[i] = p;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    const double span = hi - lo;
    for (int64_t i = 0; i < npix; ++i) {
        if (!m.valid[i]) {
            g.values[i] = 0.0;
        } else {
            g.values[i] = span > 0.0 ? (g.values[i] - lo) / span : 0.0;
        }
    }
    return g;
}

Raster select_bands(const Raster& r, const std::vector<std::string>& names) {
    r.validate();
    if (names.empty()) throw Error("select_bands: no bands requested");
    Raster out;
    out.width = r.width;
    out.height = r.height;
    out.bands = static_cast<int>(names.size());
    out.band_names = names;
    out.data.resize(static_cast<size_t>(out.pixel_count()) * out.bands);
    for (size_t i = 0; i < names.size(); ++i) {
        const int b = r.band_index(names[i]);
        std::copy_n(r.band(b), r.pixel_count(), out.data.data() + static_cast<int64_t>(i) * r.pixel_count());
    }
    return out;
}

}  // namespace spx
