#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "lstgrid/raster.hpp"

namespace lstgrid::io {

/// One line per row, values with two decimals separated by spaces, nodata as
/// `NA`.
void write_lst_text(const RasterGrid& grid, std::ostream& out);
void write_lst_text(const RasterGrid& grid, const std::filesystem::path& path);

/// Inverse of write_lst_text; `NA` becomes the grid's nodata (-9999).
RasterGrid parse_lst_text(std::string_view text, std::string_view source = "<lst text>");
RasterGrid read_lst_text(const std::filesystem::path& path);

} // namespace lstgrid::io
