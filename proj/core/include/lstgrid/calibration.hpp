#pragma once

#include <cstddef>

#include "lstgrid/raster.hpp"
#include "lstgrid/scene.hpp"

namespace lstgrid {

/// Dark-object fraction of the image used to locate L_min (0.01 %).
inline constexpr double kDefaultDosFraction = 1e-4;

/// Reflectance outside this range is clamped and counted.
inline constexpr double kMinReflectance = 0.0;
inline constexpr double kMaxReflectance = 1.2;

struct AtmosphericCorrection {
    double l_min = 0.0;
    double l_one_percent = 0.0;
    double l_path = 0.0;
    // l_min < l_one_percent: l_path forced to 0.
    bool clamped = false;
};

/// gain * dn + bias.
inline double dn_to_radiance(double dn, const BandCalibration& cal) {
    return cal.gain * dn + cal.bias;
}

RasterGrid dn_to_radiance(const RasterGrid& dn, const BandCalibration& cal);

/// Smallest DN whose cumulative count reaches fraction * total.
int dark_object_dn(const DnHistogram& hist, double fraction = kDefaultDosFraction);

/// Radiance of the dark-object DN. Throws std::invalid_argument on an empty
/// histogram or a fraction outside (0, 1).
double dark_object_radiance(const DnHistogram& hist, const BandCalibration& cal,
                            double fraction = kDefaultDosFraction);

/// Radiance of a 1 % reflector: 0.01 cos(theta) Tz E0 / (pi d^2), Tz = cos(theta).
double haze_radiance(const SceneContext& ctx, const BandCalibration& cal);

/// L_min - L_1%, clamped at 0 (with a warning).
AtmosphericCorrection path_radiance(double l_min, double l_one_percent);

/// Full DOS estimate for one band from its DN histogram.
AtmosphericCorrection dark_object_subtraction(const DnHistogram& hist, const SceneContext& ctx,
                                              const BandCalibration& cal,
                                              double fraction = kDefaultDosFraction);

/// pi (L - L_p) d^2 / (E0 cos(theta) Tz). Unclamped. Pass l_path = 0 for
/// top-of-atmosphere reflectance.
double at_surface_reflectance(double l_sensor, double l_path, const SceneContext& ctx,
                              const BandCalibration& cal);

/// Precomputed per-band conversion DN -> reflectance.
struct ReflectanceModel {
    double gain = 1.0;
    double bias = 0.0;
    double l_path = 0.0;
    /// pi d^2 / (E0 cos^2 theta).
    double scale = 1.0;

    /// Throws FormatError when the band has no E0.
    static ReflectanceModel for_band(const SceneContext& ctx, const BandCalibration& cal,
                                     double l_path);

    double unclamped(double dn) const noexcept { return scale * (gain * dn + bias - l_path); }

    static double clamp(double rho) noexcept {
        return rho < kMinReflectance ? kMinReflectance
                                     : (rho > kMaxReflectance ? kMaxReflectance : rho);
    }
};

struct ReflectanceGrid {
    RasterGrid reflectance;
    std::size_t clamped_pixels = 0;
};

/// DN grid -> reflectance clamped to [0, 1.2]; nodata passes through.
ReflectanceGrid reflectance_grid(const RasterGrid& dn, const ReflectanceModel& model);

} // namespace lstgrid
