#include "lstgrid/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lstgrid {

RasterGrid::RasterGrid(std::size_t width, std::size_t height, double nodata, double fill)
    : width_(width), height_(height), nodata_(nodata), samples_(width * height, fill) {}

RasterGrid::RasterGrid(std::size_t width, std::size_t height, std::vector<double> samples,
                       double nodata)
    : width_(width), height_(height), nodata_(nodata), samples_(std::move(samples)) {
    if (samples_.size() != width * height)
        throw std::invalid_argument("raster: " + std::to_string(samples_.size()) +
                                    " samples for a " + std::to_string(width) + "x" +
                                    std::to_string(height) + " grid");
}

std::span<const double> RasterGrid::row(std::size_t r) const {
    if (r >= height_) throw std::out_of_range("raster row out of range");
    return std::span<const double>(samples_).subspan(r * width_, width_);
}

std::span<double> RasterGrid::row(std::size_t r) {
    if (r >= height_) throw std::out_of_range("raster row out of range");
    return std::span<double>(samples_).subspan(r * width_, width_);
}

double RasterGrid::at(std::size_t r, std::size_t c) const {
    if (r >= height_ || c >= width_) throw std::out_of_range("raster index out of range");
    return samples_[r * width_ + c];
}

void RasterGrid::set(std::size_t r, std::size_t c, double v) {
    if (r >= height_ || c >= width_) throw std::out_of_range("raster index out of range");
    samples_[r * width_ + c] = v;
}

bool RasterGrid::is_nodata(double v) const noexcept {
    if (std::isnan(nodata_)) return std::isnan(v);
    return v == nodata_;
}

RasterGrid RasterGrid::window(std::size_t row0, std::size_t rows, std::size_t col0,
                              std::size_t cols) const {
    if (row0 + rows > height_ || col0 + cols > width_)
        throw std::out_of_range("raster window exceeds grid");
    RasterGrid out(cols, rows, nodata_);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* src = samples_.data() + (row0 + r) * width_ + col0;
        std::copy(src, src + cols, out.samples_.data() + r * cols);
    }
    return out;
}

void RasterGrid::paste(const RasterGrid& tile, std::size_t row0, std::size_t col0) {
    if (row0 + tile.height_ > height_ || col0 + tile.width_ > width_)
        throw std::out_of_range("raster paste exceeds grid");
    for (std::size_t r = 0; r < tile.height_; ++r) {
        const double* src = tile.samples_.data() + r * tile.width_;
        std::copy(src, src + tile.width_, samples_.data() + (row0 + r) * width_ + col0);
    }
}

bool bit_identical(const RasterGrid& a, const RasterGrid& b) {
    if (!a.same_shape(b)) return false;
    if (std::bit_cast<std::uint64_t>(a.nodata()) != std::bit_cast<std::uint64_t>(b.nodata()))
        return false;
    const auto sa = a.samples();
    const auto sb = b.samples();
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (std::bit_cast<std::uint64_t>(sa[i]) != std::bit_cast<std::uint64_t>(sb[i]))
            return false;
    return true;
}

GridStats stats(const RasterGrid& grid) {
    GridStats s;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    // Neumaier-compensated sums keep the moments (nearly) order-independent.
    double sum = 0.0, sum_c = 0.0;
    auto add = [](double& acc, double& comp, double v) {
        const double t = acc + v;
        if (std::abs(acc) >= std::abs(v))
            comp += (acc - t) + v;
        else
            comp += (v - t) + acc;
        acc = t;
    };
    for (double v : grid.samples()) {
        if (grid.is_nodata(v)) continue;
        ++s.count;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        add(sum, sum_c, v);
    }
    if (s.count == 0) {
        s.min = s.max = s.mean = s.stddev = nan;
        return s;
    }
    const double n = static_cast<double>(s.count);
    const double mean = (sum + sum_c) / n;
    double ss = 0.0, ss_c = 0.0;
    for (double v : grid.samples()) {
        if (grid.is_nodata(v)) continue;
        const double d = v - mean;
        add(ss, ss_c, d * d);
    }
    s.min = lo;
    s.max = hi;
    // Rounding can push the mean a hair outside [min, max] for constant data.
    s.mean = std::clamp(mean, lo, hi);
    s.stddev = std::sqrt((ss + ss_c) / n);
    return s;
}

DnHistogram::DnHistogram(int max_dn) {
    if (max_dn < 0) throw std::invalid_argument("histogram: max_dn must be >= 0");
    counts.assign(static_cast<std::size_t>(max_dn) + 1, 0);
}

DnHistogram& DnHistogram::merge(const DnHistogram& other) {
    if (counts.empty()) {
        *this = other;
        return *this;
    }
    if (other.counts.empty()) return *this;
    if (other.counts.size() != counts.size())
        throw std::invalid_argument("histogram merge: DN ranges differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
    return *this;
}

DnHistogram dn_histogram(const RasterGrid& grid, int max_dn) {
    DnHistogram h(max_dn);
    const auto samples = grid.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i];
        if (grid.is_nodata(v)) continue;
        if (!(v >= 0.0 && v <= max_dn) || v != std::floor(v))
            throw std::invalid_argument("histogram: sample " + std::to_string(v) + " at pixel " +
                                        std::to_string(i) + " is not an integer DN in [0, " +
                                        std::to_string(max_dn) + "]");
        ++h.counts[static_cast<std::size_t>(v)];
        ++h.total;
    }
    return h;
}

} // namespace lstgrid
