#pragma once

#include <cstdint>
#include <vector>

#include "spx/raster.hpp"
#include "spx/superpixel.hpp"

namespace spx::reference {

// Straightforward serial implementations of the kernels that run under
// OpenMP in the library. Tests assert bit-identical agreement with the
// optimized paths; the benchmark target compares their throughput.

// Classic SLIC assignment: scan each center's 2Sx2S window and let the
// lowest distance claim the pixel (ties to the smaller center id).
// Matches detail::slic_assign exactly.
Segmentation slic(const GrayImage& g, const Mask& m, const SuperpixelParams& p);

}  // namespace spx::reference
