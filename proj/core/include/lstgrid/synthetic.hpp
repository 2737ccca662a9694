#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lstgrid/classified.hpp"
#include "lstgrid/classifier.hpp"
#include "lstgrid/raster.hpp"
#include "lstgrid/scene.hpp"

namespace lstgrid {

/// Options for a Dobrogea-like test scene: seven land-cover classes laid
/// out in square patches, DN bands derived from per-class reflectance and
/// surface temperature plus Gaussian DN noise.
struct SyntheticSceneOptions {
    std::size_t width = 256;
    std::size_t height = 256;
    std::size_t patch = 32;
    std::uint64_t seed = 1989;
    Sensor sensor = Sensor::TM;
    double sun_zenith_deg = 40.0;
    int doy = 232;
    double water_vapour_g_cm2 = 2.0;
    /// Additive haze radiance on the red and NIR bands.
    double path_radiance_red = 3.0;
    double path_radiance_nir = 1.5;
    double dn_noise_sigma = 1.2;
    /// Only the LST bands (red, NIR, thermal) are generated when false.
    bool classification_bands = true;
};

struct SyntheticScene {
    SceneMetadata metadata;
    std::map<std::string, RasterGrid> bands; // DN, keyed by band id
    ClassifiedGrid truth;
    std::vector<TrainingRegion> training;
};

/// Land-cover class names in label order (label = index + 1).
const std::vector<std::string>& synthetic_class_names();

SyntheticScene make_synthetic_scene(const SyntheticSceneOptions& options = {});

/// Writes band_<id>.tif (8-bit), metadata.txt, training.txt and truth.tif.
void write_synthetic_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

} // namespace lstgrid
