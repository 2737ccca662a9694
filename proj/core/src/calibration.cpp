#include "lstgrid/calibration.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lstgrid/diag.hpp"
#include "lstgrid/error.hpp"

namespace lstgrid {

namespace {

double require_e0(const BandCalibration& cal) {
    if (!cal.e0) throw FormatError("band " + cal.band_id + ": e0 (solar irradiance) is required");
    return *cal.e0;
}

} // namespace

RasterGrid dn_to_radiance(const RasterGrid& dn, const BandCalibration& cal) {
    RasterGrid out = dn;
    for (double& v : out.samples())
        if (!out.is_nodata(v)) v = dn_to_radiance(v, cal);
    return out;
}

int dark_object_dn(const DnHistogram& hist, double fraction) {
    if (hist.total == 0) throw std::invalid_argument("dark object: empty histogram");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("dark object: fraction must be in (0, 1)");
    const double threshold = fraction * static_cast<double>(hist.total);
    std::uint64_t cumulative = 0;
    for (std::size_t dn = 0; dn < hist.counts.size(); ++dn) {
        cumulative += hist.counts[dn];
        if (static_cast<double>(cumulative) >= threshold) return static_cast<int>(dn);
    }
    return hist.max_dn(); // unreachable: cumulative reaches total
}

double dark_object_radiance(const DnHistogram& hist, const BandCalibration& cal, double fraction) {
    return dn_to_radiance(dark_object_dn(hist, fraction), cal);
}

double haze_radiance(const SceneContext& ctx, const BandCalibration& cal) {
    const double e0 = require_e0(cal);
    const double cz = ctx.cos_sun_zenith();
    const double d = ctx.earth_sun_distance();
    return 0.01 * cz * cz * e0 / (std::numbers::pi * d * d);
}

AtmosphericCorrection path_radiance(double l_min, double l_one_percent) {
    AtmosphericCorrection c{l_min, l_one_percent, l_min - l_one_percent, false};
    if (c.l_path < 0.0) {
        warn("negative path radiance (L_min " + std::to_string(l_min) + " < L_1% " +
             std::to_string(l_one_percent) + "), clamped to 0");
        c.l_path = 0.0;
        c.clamped = true;
    }
    return c;
}

AtmosphericCorrection dark_object_subtraction(const DnHistogram& hist, const SceneContext& ctx,
                                              const BandCalibration& cal, double fraction) {
    return path_radiance(dark_object_radiance(hist, cal, fraction), haze_radiance(ctx, cal));
}

double at_surface_reflectance(double l_sensor, double l_path, const SceneContext& ctx,
                              const BandCalibration& cal) {
    const double e0 = require_e0(cal);
    const double cz = ctx.cos_sun_zenith();
    if (!(cz > 0.0)) throw std::invalid_argument("reflectance: sun below horizon");
    const double d = ctx.earth_sun_distance();
    return std::numbers::pi * (l_sensor - l_path) * d * d / (e0 * cz * cz);
}

ReflectanceModel ReflectanceModel::for_band(const SceneContext& ctx, const BandCalibration& cal,
                                            double l_path) {
    const double e0 = require_e0(cal);
    const double cz = ctx.cos_sun_zenith();
    if (!(cz > 0.0)) throw std::invalid_argument("reflectance: sun below horizon");
    const double d = ctx.earth_sun_distance();
    return {cal.gain, cal.bias, l_path, std::numbers::pi * d * d / (e0 * cz * cz)};
}

ReflectanceGrid reflectance_grid(const RasterGrid& dn, const ReflectanceModel& model) {
    ReflectanceGrid out{dn, 0};
    for (double& v : out.reflectance.samples()) {
        if (out.reflectance.is_nodata(v)) continue;
        const double rho = model.unclamped(v);
        v = ReflectanceModel::clamp(rho);
        if (v != rho) ++out.clamped_pixels;
    }
    return out;
}

} // namespace lstgrid
