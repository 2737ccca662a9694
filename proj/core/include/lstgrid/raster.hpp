#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lstgrid {

inline constexpr double kDefaultNodata = -9999.0;

/// Row-major grid of samples, row 0 at the top. Pixels equal to the nodata
/// sentinel are excluded from every statistic.
class RasterGrid {
public:
    RasterGrid() = default;

    /// Grid of the given shape filled with `fill`.
    RasterGrid(std::size_t width, std::size_t height, double nodata = kDefaultNodata,
               double fill = 0.0);

    RasterGrid(std::size_t width, std::size_t height, std::vector<double> samples,
               double nodata = kDefaultNodata);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    double nodata() const noexcept { return nodata_; }

    std::span<const double> samples() const noexcept { return samples_; }
    std::span<double> samples() noexcept { return samples_; }
    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);

    double at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, double v);

    bool is_nodata(double v) const noexcept;
    bool is_valid_at(std::size_t i) const noexcept { return !is_nodata(samples_[i]); }

    /// Copy of the rectangle [row0, row0+rows) x [col0, col0+cols).
    RasterGrid window(std::size_t row0, std::size_t rows, std::size_t col0,
                      std::size_t cols) const;

    /// Writes `tile` into this grid with its top-left corner at (row0, col0).
    void paste(const RasterGrid& tile, std::size_t row0, std::size_t col0);

    bool same_shape(const RasterGrid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const RasterGrid&, const RasterGrid&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    double nodata_ = kDefaultNodata;
    std::vector<double> samples_;
};

/// Bitwise comparison: true when shape, nodata and every sample have identical
/// IEEE-754 bit patterns (NaN-safe).
bool bit_identical(const RasterGrid& a, const RasterGrid& b);

struct GridStats {
    std::size_t count = 0;
    // Undefined (NaN) when count == 0.
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0; // population
};

GridStats stats(const RasterGrid& grid);

/// Occurrence count per integer digital number 0..max_dn.
struct DnHistogram {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    DnHistogram() = default;
    explicit DnHistogram(int max_dn);

    int max_dn() const noexcept { return static_cast<int>(counts.size()) - 1; }

    /// Element-wise sum. Both histograms must cover the same DN range.
    DnHistogram& merge(const DnHistogram& other);

    friend bool operator==(const DnHistogram&, const DnHistogram&) = default;
};

/// Throws std::invalid_argument on a valid sample that is not an integer in
/// [0, max_dn].
DnHistogram dn_histogram(const RasterGrid& grid, int max_dn);

} // namespace lstgrid
