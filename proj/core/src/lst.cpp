#include "lstgrid/lst.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lstgrid/diag.hpp"
#include "lstgrid/error.hpp"

namespace lstgrid {

PsiCoefficients psi(double w) {
    if (!(w >= 0.0)) throw std::invalid_argument("psi: water vapour must be >= 0");
    if (w < 0.5 || w > 3.0)
        warn("water vapour " + std::to_string(w) + " g/cm2 outside the [0.5, 3] fit range");
    const double w2 = w * w;
    return {
        0.1471 * w2 - 0.15583 * w + 1.1234,
        -1.1836 * w2 - 0.37607 * w - 0.52894,
        -0.04554 * w2 + 1.8719 * w - 0.39071,
    };
}

std::optional<double> brightness_temperature(double l_sensor, const BandCalibration& cal) {
    if (!(l_sensor > 0.0) || !cal.k1 || !cal.k2) return std::nullopt;
    return *cal.k2 / std::log(*cal.k1 / l_sensor + 1.0);
}

double radiance_from_brightness_temperature(double kelvin, const BandCalibration& cal) {
    if (!cal.k1 || !cal.k2) throw std::invalid_argument("band " + cal.band_id + " lacks k1/k2");
    return *cal.k1 / std::expm1(*cal.k2 / kelvin);
}

std::optional<GammaDelta> gamma_delta(double l_sensor, double t_sensor, const BandCalibration& cal) {
    if (!(l_sensor > 0.0) || !(t_sensor > 0.0) || !cal.lambda_um || !(*cal.lambda_um > 0.0))
        return std::nullopt;
    const double lambda = *cal.lambda_um;
    const double lambda4 = lambda * lambda * lambda * lambda;
    const double slope = PlanckConstants::c2 * l_sensor / (t_sensor * t_sensor) *
                         (lambda4 * l_sensor / PlanckConstants::c1 + 1.0 / lambda);
    const double gamma = 1.0 / slope;
    return GammaDelta{gamma, -gamma * l_sensor + t_sensor};
}

std::optional<double> lst_pixel(double l_sensor, double emissivity, const PsiCoefficients& p,
                                const BandCalibration& cal) {
    if (emissivity > 1.0) emissivity = 1.0;
    if (!(emissivity > 0.9)) return std::nullopt;
    const auto t_sensor = brightness_temperature(l_sensor, cal);
    if (!t_sensor) return std::nullopt;
    const auto gd = gamma_delta(l_sensor, *t_sensor, cal);
    if (!gd) return std::nullopt;
    return gd->gamma * ((p.psi1 * l_sensor + p.psi2) / emissivity + p.psi3) + gd->delta;
}

RasterGrid lst_map(const RasterGrid& thermal_dn, const RasterGrid& ndvi_grid,
                   const PsiCoefficients& p, const BandCalibration& cal,
                   const EmissivityConfig& cfg) {
    if (!thermal_dn.same_shape(ndvi_grid))
        throw std::invalid_argument("lst_map: thermal and NDVI shapes differ");
    RasterGrid out(thermal_dn.width(), thermal_dn.height(), thermal_dn.nodata());
    const auto dn = thermal_dn.samples();
    const auto nd = ndvi_grid.samples();
    auto o = out.samples();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = out.nodata();
        if (thermal_dn.is_nodata(dn[i]) || ndvi_grid.is_nodata(nd[i])) continue;
        const double eps = lse(nd[i], cfg);
        if (const auto ts = lst_pixel(cal.gain * dn[i] + cal.bias, eps, p, cal))
            o[i] = *ts - kKelvinOffset;
    }
    return out;
}

RasterGrid lst_map(const RasterGrid& thermal_dn, const RasterGrid& ndvi_grid,
                   const SceneContext& ctx, const BandCalibration& cal,
                   const EmissivityConfig& cfg) {
    if (!ctx.water_vapour_g_cm2)
        throw FormatError("lst_map: missing required key 'water_vapour_g_cm2'");
    return lst_map(thermal_dn, ndvi_grid, psi(*ctx.water_vapour_g_cm2), cal, cfg);
}

} // namespace lstgrid
