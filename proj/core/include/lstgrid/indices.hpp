#pragma once

#include <limits>

#include "lstgrid/raster.hpp"

namespace lstgrid {

/// NDVI-thresholds emissivity. Inside [ndvi_low, ndvi_high] the log fit is
/// used; outside, the constants.
struct EmissivityConfig {
    double ndvi_low = 0.157;
    double ndvi_high = 0.727;
    double eps_soil = 0.97;
    double eps_veg = 0.99;
    double eps_water = 0.995;

    void validate() const;
};

/// (nir - red) / (nir + red); NaN when the denominator is 0.
inline double ndvi(double red, double nir) noexcept {
    const double den = nir + red;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (nir - red) / den;
}

/// Nodata (red's sentinel) where either input is nodata or the denominator
/// vanishes. Throws std::invalid_argument on shape mismatch.
RasterGrid ndvi(const RasterGrid& red, const RasterGrid& nir);

/// Land-surface emissivity from NDVI. NaN in, NaN out.
double lse(double ndvi_value, const EmissivityConfig& cfg = {}) noexcept;

RasterGrid lse(const RasterGrid& ndvi_grid, const EmissivityConfig& cfg = {});

} // namespace lstgrid
