#include "lstgrid/indices.hpp"

#include <cmath>
#include <stdexcept>

namespace lstgrid {

void EmissivityConfig::validate() const {
    auto in_range = [](double e) { return e > 0.9 && e <= 1.0; };
    if (!in_range(eps_soil) || !in_range(eps_veg) || !in_range(eps_water))
        throw std::invalid_argument("emissivity constants must lie in (0.9, 1.0]");
    if (!(ndvi_low < ndvi_high)) throw std::invalid_argument("ndvi_low must be < ndvi_high");
    if (!(ndvi_low > 0.0)) throw std::invalid_argument("ndvi_low must be > 0 (log branch)");
}

RasterGrid ndvi(const RasterGrid& red, const RasterGrid& nir) {
    if (!red.same_shape(nir)) throw std::invalid_argument("ndvi: red and nir shapes differ");
    RasterGrid out(red.width(), red.height(), red.nodata());
    const auto r = red.samples();
    const auto n = nir.samples();
    auto o = out.samples();
    for (std::size_t i = 0; i < o.size(); ++i) {
        if (red.is_nodata(r[i]) || nir.is_nodata(n[i])) {
            o[i] = out.nodata();
            continue;
        }
        const double v = ndvi(r[i], n[i]);
        o[i] = std::isnan(v) ? out.nodata() : v;
    }
    return out;
}

double lse(double v, const EmissivityConfig& cfg) noexcept {
    if (std::isnan(v)) return v;
    if (v < 0.0) return cfg.eps_water;
    if (v < cfg.ndvi_low) return cfg.eps_soil;
    if (v > cfg.ndvi_high) return cfg.eps_veg;
    return 1.0094 + 0.047 * std::log(v);
}

RasterGrid lse(const RasterGrid& ndvi_grid, const EmissivityConfig& cfg) {
    RasterGrid out = ndvi_grid;
    for (double& v : out.samples())
        if (!out.is_nodata(v)) v = lse(v, cfg);
    return out;
}

} // namespace lstgrid
