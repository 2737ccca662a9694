#pragma once

#include <filesystem>

#include "lstgrid/raster.hpp"

namespace lstgrid::io {

/// Reads a raster by extension: .tif/.tiff as TIFF, .txt as LST text,
/// anything else as ESRI ASCII grid.
RasterGrid read_raster(const std::filesystem::path& path);

} // namespace lstgrid::io
