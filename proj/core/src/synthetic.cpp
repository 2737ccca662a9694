#include "lstgrid/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lstgrid/indices.hpp"
#include "lstgrid/io/tiff.hpp"
#include "lstgrid/lst.hpp"

namespace lstgrid {

namespace {

struct ClassSpectrum {
    const char* name;
    // Surface reflectance for bands 1, 2, 3, 4, 5, 7.
    double rho[6];
    double surface_temp_c;
};

constexpr ClassSpectrum kClasses[] = {
    {"high_density_built", {0.14, 0.15, 0.18, 0.22, 0.30, 0.26}, 46.0},
    {"medium_density_built", {0.11, 0.12, 0.14, 0.24, 0.26, 0.20}, 42.0},
    {"low_density_built", {0.09, 0.10, 0.11, 0.26, 0.22, 0.15}, 38.0},
    {"dense_vegetation", {0.05, 0.07, 0.04, 0.45, 0.18, 0.08}, 31.0},
    {"sparse_vegetation", {0.07, 0.09, 0.08, 0.32, 0.24, 0.13}, 35.0},
    {"water", {0.08, 0.06, 0.03, 0.02, 0.01, 0.005}, 24.0},
    {"barren", {0.17, 0.19, 0.24, 0.30, 0.38, 0.32}, 48.0},
};
constexpr std::size_t kClassCount = std::size(kClasses);

int reflective_index(const std::string& id) {
    static const char* ids[] = {"1", "2", "3", "4", "5", "7"};
    for (int i = 0; i < 6; ++i)
        if (id == ids[i]) return i;
    return -1;
}

// At-sensor radiance whose retrieved LST equals the class temperature,
// found by bisection (LST is increasing in radiance).
double thermal_radiance(const ClassSpectrum& c, const BandCalibration& cal, double w) {
    const double red = c.rho[2], nir = c.rho[3];
    const double eps = std::min(1.0, lse(ndvi(red, nir)));
    const auto coeffs = psi(w);
    const double target = c.surface_temp_c + kKelvinOffset;
    double lo = 0.5, hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto t = lst_pixel(mid, eps, coeffs, cal);
        if (t && *t < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

const std::vector<std::string>& synthetic_class_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& c : kClasses) v.emplace_back(c.name);
        return v;
    }();
    return names;
}

SyntheticScene make_synthetic_scene(const SyntheticSceneOptions& o) {
    if (o.width == 0 || o.height == 0 || o.patch == 0)
        throw std::invalid_argument("synthetic scene: zero dimension");

    SyntheticScene scene;
    auto& ctx = scene.metadata.context;
    ctx.sensor = o.sensor;
    ctx.sun_zenith_deg = o.sun_zenith_deg;
    ctx.acquisition_doy = o.doy;
    ctx.water_vapour_g_cm2 = o.water_vapour_g_cm2;
    scene.metadata.bands = default_calibrations(o.sensor);

    std::mt19937_64 rng(o.seed);

    // Land-cover layout: the first seven patches in scan order cover every
    // class once, the rest are random.
    const std::size_t prow = (o.height + o.patch - 1) / o.patch;
    const std::size_t pcol = (o.width + o.patch - 1) / o.patch;
    std::vector<std::uint8_t> patch_class(prow * pcol);
    std::uniform_int_distribution<std::size_t> pick(0, kClassCount - 1);
    for (std::size_t i = 0; i < patch_class.size(); ++i)
        patch_class[i] = static_cast<std::uint8_t>(i < kClassCount ? i : pick(rng));

    scene.truth = ClassifiedGrid(o.width, o.height, synthetic_class_names());
    for (std::size_t r = 0; r < o.height; ++r)
        for (std::size_t c = 0; c < o.width; ++c)
            scene.truth.labels[r * o.width + c] =
                static_cast<std::uint8_t>(patch_class[(r / o.patch) * pcol + c / o.patch] + 1);

    // Training rectangles at the centre of the first patch of each class
    // that is fully inside the image.
    for (std::size_t k = 0; k < kClassCount; ++k) {
        for (std::size_t i = 0; i < patch_class.size(); ++i) {
            if (patch_class[i] != k) continue;
            const std::size_t r0 = (i / pcol) * o.patch;
            const std::size_t c0 = (i % pcol) * o.patch;
            if (r0 + o.patch > o.height || c0 + o.patch > o.width) continue;
            const std::size_t side = std::min<std::size_t>(20, o.patch > 4 ? o.patch - 4 : o.patch);
            const std::size_t off = (o.patch - side) / 2;
            scene.training.push_back({kClasses[k].name, r0 + off, c0 + off, r0 + off + side - 1,
                                      c0 + off + side - 1});
            break;
        }
    }

    const auto defaults = default_bands(o.sensor);
    std::vector<std::string> ids = {defaults.red, defaults.nir, defaults.thermal};
    if (o.classification_bands)
        for (const auto& id : defaults.classification)
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);

    const double d = ctx.earth_sun_distance();
    const double cz = ctx.cos_sun_zenith();
    std::normal_distribution<double> noise(0.0, o.dn_noise_sigma);
    auto quantize = [](double dn) { return std::clamp(std::round(dn), 1.0, 254.0); };

    for (const auto& id : ids) {
        const auto& cal = scene.metadata.band(id);
        std::array<double, kClassCount> mean_dn{};
        for (std::size_t k = 0; k < kClassCount; ++k) {
            double radiance = 0.0;
            if (cal.k1) {
                radiance = thermal_radiance(kClasses[k], cal, o.water_vapour_g_cm2);
            } else {
                const int bi = reflective_index(id);
                if (bi < 0 || !cal.e0) throw std::logic_error("synthetic: no spectrum for band " + id);
                const double haze = id == defaults.red ? o.path_radiance_red
                                    : id == defaults.nir ? o.path_radiance_nir : 0.0;
                radiance = kClasses[k].rho[bi] * *cal.e0 * cz * cz / (std::numbers::pi * d * d) + haze;
            }
            mean_dn[k] = (radiance - cal.bias) / cal.gain;
        }
        RasterGrid band(o.width, o.height);
        auto s = band.samples();
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = quantize(mean_dn[scene.truth.labels[i] - 1] + noise(rng));
        scene.bands.emplace(id, std::move(band));
    }
    return scene;
}

void write_synthetic_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [id, band] : scene.bands)
        io::write_tiff(band, dir / ("band_" + id + ".tif"), io::TiffSampleType::UInt8);
    io::write_tiff(scene.truth, dir / "truth.tif");
    {
        std::ofstream out(dir / "metadata.txt");
        out << "# synthetic scene\n" << format_scene_metadata(scene.metadata);
    }
    std::ofstream out(dir / "training.txt");
    out << "# class_name row0 col0 row1 col1\n";
    for (const auto& r : scene.training)
        out << r.class_name << ' ' << r.row0 << ' ' << r.col0 << ' ' << r.row1 << ' ' << r.col1 << '\n';
}

} // namespace lstgrid
