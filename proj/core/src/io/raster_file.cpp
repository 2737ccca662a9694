#include "lstgrid/io/raster_file.hpp"

#include "lstgrid/io/ascii_grid.hpp"
#include "lstgrid/io/lst_text.hpp"
#include "lstgrid/io/tiff.hpp"
#include "../text_util.hpp"

namespace lstgrid::io {

RasterGrid read_raster(const std::filesystem::path& path) {
    const std::string ext = detail::lower(path.extension().string());
    if (ext == ".tif" || ext == ".tiff") return read_tiff(path);
    if (ext == ".txt") return read_lst_text(path);
    return read_ascii_grid(path);
}

} // namespace lstgrid::io
