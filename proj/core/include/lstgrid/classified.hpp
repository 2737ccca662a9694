#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lstgrid {

inline constexpr std::uint8_t kUnclassified = 0;

/// Per-pixel class labels; label k >= 1 names legend[k - 1], 0 is
/// unclassified.
struct ClassifiedGrid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> labels;
    std::vector<std::string> legend;

    ClassifiedGrid() = default;
    ClassifiedGrid(std::size_t w, std::size_t h, std::vector<std::string> names = {})
        : width(w), height(h), labels(w * h, kUnclassified), legend(std::move(names)) {}

    std::uint8_t at(std::size_t r, std::size_t c) const { return labels[r * width + c]; }

    friend bool operator==(const ClassifiedGrid&, const ClassifiedGrid&) = default;
};

} // namespace lstgrid
