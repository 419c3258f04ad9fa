#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spx/raster.hpp"

namespace spx {

// Flat-binary image format. A text header (one key=value per line: width,
// height, bands, dtype, interleave=bsq, optional band_names comma list)
// sits next to a payload holding the samples band-sequentially, row-major,
// little-endian. dtype is f32le for rasters, u8 for masks and label maps,
// u32le for segmentations.
struct RasterHeader {
    int width = 0;
    int height = 0;
    int bands = 1;
    std::string dtype;
    std::string interleave = "bsq";
    std::vector<std::string> band_names;
};

// Payload path rule: the header's extension is replaced by ".bin"
// (scene.hdr -> scene.bin).
std::string payload_path(const std::string& header_path);

RasterHeader read_raster_header(const std::string& header_path);
void write_raster_header(const std::string& header_path, const RasterHeader& h);

Raster load_raster(const std::string& header_path);
void save_raster(const std::string& header_path, const Raster& r);

Mask load_mask(const std::string& header_path);
void save_mask(const std::string& header_path, const Mask& m);

LabelMap load_labelmap(const std::string& header_path);
void save_labelmap(const std::string& header_path, const LabelMap& l);

// Low-level u32le grid used by the segmentation format.
std::vector<uint32_t> load_u32_grid(const std::string& header_path, int& width, int& height);
void save_u32_grid(const std::string& header_path, int width, int height,
                   const std::vector<uint32_t>& values);

}  // namespace spx
