#include "spx/raster_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spx/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "flat-binary payloads are little-endian; big-endian hosts are unsupported");

namespace spx {

namespace {

std::vector<char> read_all_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const auto size = static_cast<size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes(size);
    if (size > 0) in.read(bytes.data(), static_cast<std::streamsize>(size));
    if (!in) throw Error("short read: " + path);
    return bytes;
}

void write_all_bytes(const std::string& path, const void* data, size_t n) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path);
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw Error("short write: " + path);
}

size_t dtype_size(const std::string& dtype) {
    if (dtype == "f32le") return 4;
    if (dtype == "u8") return 1;
    if (dtype == "u32le") return 4;
    throw Error("unknown dtype: " + dtype);
}

std::vector<char> load_payload(const std::string& header_path, const RasterHeader& h) {
    const std::string ppath = payload_path(header_path);
    auto bytes = read_all_bytes(ppath);
    const size_t expected = static_cast<size_t>(h.width) * h.height * h.bands * dtype_size(h.dtype);
    if (bytes.size() != expected)
        throw Error("payload size mismatch in " + ppath + ": header implies " +
                    std::to_string(expected) + " bytes, file has " + std::to_string(bytes.size()));
    return bytes;
}

void check_dims(const RasterHeader& h, const std::string& path) {
    if (h.width < 1 || h.height < 1 || h.bands < 1)
        throw Error("bad dimensions in header " + path);
}

}  // namespace

std::string payload_path(const std::string& header_path) {
    const auto slash = header_path.find_last_of('/');
    const auto dot = header_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return header_path + ".bin";
    return header_path.substr(0, dot) + ".bin";
}

RasterHeader read_raster_header(const std::string& header_path) {
    std::ifstream in(header_path);
    if (!in) throw Error("cannot open header: " + header_path);
    RasterHeader h;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("malformed header line in " + header_path + ": " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "width") h.width = std::stoi(value);
        else if (key == "height") h.height = std::stoi(value);
        else if (key == "bands") h.bands = std::stoi(value);
        else if (key == "dtype") h.dtype = value;
        else if (key == "interleave") h.interleave = value;
        else if (key == "band_names") {
            std::stringstream ss(value);
            std::string name;
            while (std::getline(ss, name, ',')) h.band_names.push_back(name);
        } else {
            throw Error("unknown header key \"" + key + "\" in " + header_path);
        }
    }
    if (h.dtype.empty()) throw Error("header missing dtype: " + header_path);
    if (h.interleave != "bsq") throw Error("unsupported interleave in " + header_path);
    check_dims(h, header_path);
    return h;
}

void write_raster_header(const std::string& header_path, const RasterHeader& h) {
    std::ostringstream out;
    out << "width=" << h.width << "\n"
        << "height=" << h.height << "\n"
        << "bands=" << h.bands << "\n"
        << "dtype=" << h.dtype << "\n"
        << "interleave=" << h.interleave << "\n";
    if (!h.band_names.empty()) {
        out << "band_names=";
        for (size_t i = 0; i < h.band_names.size(); ++i)
            out << (i ? "," : "") << h.band_names[i];
        out << "\n";
    }
    const std::string text = out.str();
    write_all_bytes(header_path, text.data(), text.size());
}

Raster load_raster(const std::string& header_path) {
    const RasterHeader h = read_raster_header(header_path);
    if (h.dtype != "f32le") throw Error("expected dtype f32le in " + header_path + ", got " + h.dtype);
    const auto bytes = load_payload(header_path, h);
    Raster r;
    r.width = h.width;
    r.height = h.height;
    r.bands = h.bands;
    r.band_names = h.band_names;
    r.data.resize(bytes.size() / 4);
    std::memcpy(r.data.data(), bytes.data(), bytes.size());
    for (size_t i = 0; i < r.data.size(); ++i)
        if (!std::isfinite(r.data[i]))
            throw Error("non-finite sample at index " + std::to_string(i) + " in " +
                        payload_path(header_path));
    return r;
}

void save_raster(const std::string& header_path, const Raster& r) {
    r.validate();
    RasterHeader h;
    h.width = r.width;
    h.height = r.height;
    h.bands = r.bands;
    h.dtype = "f32le";
    h.band_names = r.band_names;
    write_raster_header(header_path, h);
    write_all_bytes(payload_path(header_path), r.data.data(), r.data.size() * 4);
}

Mask load_mask(const std::string& header_path) {
    const RasterHeader h = read_raster_header(header_path);
    if (h.dtype != "u8") throw Error("expected dtype u8 in " + header_path + ", got " + h.dtype);
    if (h.bands != 1) throw Error("mask must be single-band: " + header_path);
    const auto bytes = load_payload(header_path, h);
    Mask m;
    m.width = h.width;
    m.height = h.height;
    m.valid.assign(bytes.begin(), bytes.end());
    m.validate();
    return m;
}

void save_mask(const std::string& header_path, const Mask& m) {
    m.validate();
    RasterHeader h;
    h.width = m.width;
    h.height = m.height;
    h.bands = 1;
    h.dtype = "u8";
    write_raster_header(header_path, h);
    write_all_bytes(payload_path(header_path), m.valid.data(), m.valid.size());
}

LabelMap load_labelmap(const std::string& header_path) {
    const RasterHeader h = read_raster_header(header_path);
    if (h.dtype != "u8") throw Error("expected dtype u8 in " + header_path + ", got " + h.dtype);
    if (h.bands != 1) throw Error("label map must be single-band: " + header_path);
    const auto bytes = load_payload(header_path, h);
    LabelMap l;
    l.width = h.width;
    l.height = h.height;
    l.labels.assign(bytes.begin(), bytes.end());
    l.validate();
    return l;
}

void save_labelmap(const std::string& header_path, const LabelMap& l) {
    l.validate();
    RasterHeader h;
    h.width = l.width;
    h.height = l.height;
    h.bands = 1;
    h.dtype = "u8";
    write_raster_header(header_path, h);
    write_all_bytes(payload_path(header_path), l.labels.data(), l.labels.size());
}

std::vector<uint32_t> load_u32_grid(const std::string& header_path, int& width, int& height) {
    const RasterHeader h = read_raster_header(header_path);
    if (h.dtype != "u32le") throw Error("expected dtype u32le in " + header_path + ", got " + h.dtype);
    if (h.bands != 1) throw Error("u32 grid must be single-band: " + header_path);
    const auto bytes = load_payload(header_path, h);
    width = h.width;
    height = h.height;
    std::vector<uint32_t> values(bytes.size() / 4);
    std::memcpy(values.data(), bytes.data(), bytes.size());
    return values;
}

void save_u32_grid(const std::string& header_path, int width, int height,
                   const std::vector<uint32_t>& values) {
    if (values.size() != static_cast<size_t>(width) * height)
        throw Error("u32 grid: value count does not match dimensions");
    RasterHeader h;
    h.width = width;
    h.height = height;
    h.bands = 1;
    h.dtype = "u32le";
    write_raster_header(header_path, h);
    write_all_bytes(payload_path(header_path), values.data(), values.size() * 4);
}

}  // namespace spx
