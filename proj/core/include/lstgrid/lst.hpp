#pragma once

#include <optional>

#include "lstgrid/indices.hpp"
#include "lstgrid/raster.hpp"
#include "lstgrid/scene.hpp"

namespace lstgrid {

/// Planck radiation constants in the units the single-channel algorithm uses.
struct PlanckConstants {
    static constexpr double c1 = 1.19104e8; // W um^4 m^-2 sr^-1
    static constexpr double c2 = 14387.7;   // um K
};

inline constexpr double kKelvinOffset = 273.15;

/// Atmospheric functions of column water vapour for the TM/ETM+ thermal band.
struct PsiCoefficients {
    double psi1 = 1.0;
    double psi2 = 0.0;
    double psi3 = 0.0;
};

/// Throws std::invalid_argument for w < 0; warns outside the [0.5, 3] fit
/// range.
PsiCoefficients psi(double water_vapour_g_cm2);

/// K2 / ln(K1 / L + 1). Empty for L <= 0 or missing constants.
std::optional<double> brightness_temperature(double l_sensor, const BandCalibration& cal);

/// Inverse Planck: radiance giving brightness temperature `kelvin`.
double radiance_from_brightness_temperature(double kelvin, const BandCalibration& cal);

struct GammaDelta {
    double gamma = 0.0;
    double delta = 0.0;
};

std::optional<GammaDelta> gamma_delta(double l_sensor, double t_sensor,
                                      const BandCalibration& cal);

/// Land surface temperature in kelvin. Emissivity above 1 is capped at 1;
/// empty when emissivity is outside (0.9, 1] or radiance is not positive.
std::optional<double> lst_pixel(double l_sensor, double emissivity, const PsiCoefficients& psi,
                                const BandCalibration& cal);

/// Thermal DN + NDVI -> LST in degrees Celsius. Throws std::invalid_argument
/// on shape mismatch and FormatError when the context lacks water vapour.
RasterGrid lst_map(const RasterGrid& thermal_dn, const RasterGrid& ndvi_grid,
                   const SceneContext& ctx, const BandCalibration& cal,
                   const EmissivityConfig& cfg = {});

/// Same as lst_map with psi precomputed (what the tile kernels use).
RasterGrid lst_map(const RasterGrid& thermal_dn, const RasterGrid& ndvi_grid,
                   const PsiCoefficients& psi, const BandCalibration& cal,
                   const EmissivityConfig& cfg = {});

} // namespace lstgrid
