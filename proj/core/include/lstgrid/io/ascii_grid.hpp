#pragma once

#include <filesystem>
#include <string_view>

#include "lstgrid/raster.hpp"

namespace lstgrid::io {

struct AsciiGridGeometry {
    double xllcorner = 0.0;
    double yllcorner = 0.0;
    double cellsize = 1.0;
};

/// ESRI ASCII grid. Header keys are case-insensitive; missing NODATA_value
/// falls back to -9999. Errors carry the offending line number.
RasterGrid read_ascii_grid(const std::filesystem::path& path, AsciiGridGeometry* geometry = nullptr);
RasterGrid parse_ascii_grid(std::string_view text, std::string_view source = "<ascii grid>",
                            AsciiGridGeometry* geometry = nullptr);

/// Samples are written with 17 significant digits so doubles round-trip.
void write_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path,
                      const AsciiGridGeometry& geometry = {});

} // namespace lstgrid::io
