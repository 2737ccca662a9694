#pragma once

#include <cstddef>
#include <vector>

namespace lstgrid::engine {

struct Tile {
    std::size_t row0 = 0;
    std::size_t rows = 0;
    std::size_t col0 = 0;
    std::size_t cols = 0;

    std::size_t pixels() const noexcept { return rows * cols; }
    friend bool operator==(const Tile&, const Tile&) = default;
};

/// Horizontal row bands: min(n, height) disjoint tiles covering every row,
/// heights differing by at most one (the taller ones first). n == 0 throws
/// std::invalid_argument.
std::vector<Tile> split(std::size_t height, std::size_t width, std::size_t n);

} // namespace lstgrid::engine
