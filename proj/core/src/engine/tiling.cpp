#include "lstgrid/engine/tiling.hpp"

#include <algorithm>
#include <stdexcept>

namespace lstgrid::engine {

std::vector<Tile> split(std::size_t height, std::size_t width, std::size_t n) {
    if (n == 0) throw std::invalid_argument("split: worker count must be >= 1");
    const std::size_t bands = std::max<std::size_t>(1, std::min(n, height));
    const std::size_t base = height / bands;
    const std::size_t extra = height % bands;
    std::vector<Tile> tiles;
    tiles.reserve(bands);
    std::size_t row = 0;
    for (std::size_t i = 0; i < bands; ++i) {
        const std::size_t rows = base + (i < extra ? 1 : 0);
        tiles.push_back({row, rows, 0, width});
        row += rows;
    }
    return tiles;
}

} // namespace lstgrid::engine
