#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lstgrid/classified.hpp"
#include "lstgrid/raster.hpp"

namespace lstgrid::io {

enum class TiffSampleType { UInt8, UInt16, Float32, Float64 };

// Baseline TIFF subset: uncompressed, stripped, single sample per pixel,
// 8/16-bit unsigned or 32/64-bit IEEE float, either byte order. Tiled,
// compressed or multi-sample files are rejected with a FormatError naming the
// tag. Nodata travels in the GDAL_NODATA ASCII tag (42113).

std::vector<std::uint8_t> encode_tiff(const RasterGrid& grid, TiffSampleType type);
RasterGrid decode_tiff(std::span<const std::uint8_t> bytes);

/// 8-bit palette-color image; index 0 is black (unclassified).
std::vector<std::uint8_t> encode_classified_tiff(const ClassifiedGrid& grid);
/// Reads an 8-bit image (palette or grayscale) as labels. Legend entries are
/// synthesized as "class_<k>" up to the largest label.
ClassifiedGrid decode_classified_tiff(std::span<const std::uint8_t> bytes);

RasterGrid read_tiff(const std::filesystem::path& path);
void write_tiff(const RasterGrid& grid, const std::filesystem::path& path,
                TiffSampleType type = TiffSampleType::Float64);
void write_tiff(const ClassifiedGrid& grid, const std::filesystem::path& path);
ClassifiedGrid read_classified_tiff(const std::filesystem::path& path);

/// RGB triple per palette index used for classified output.
struct PaletteColor {
    std::uint8_t r, g, b;
};
PaletteColor class_color(std::size_t label);

} // namespace lstgrid::io
