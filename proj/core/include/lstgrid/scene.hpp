#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lstgrid {

enum class Sensor { TM, ETMPlus };

std::string_view to_string(Sensor s);
std::optional<Sensor> parse_sensor(std::string_view text);

/// Per-scene acquisition facts.
struct SceneContext {
    Sensor sensor = Sensor::TM;
    int acquisition_doy = 1;
    double sun_zenith_deg = 0.0;
    std::optional<double> earth_sun_distance_au;
    std::optional<double> water_vapour_g_cm2;

    /// Explicit distance if given, otherwise the day-of-year approximation.
    double earth_sun_distance() const;
    double cos_sun_zenith() const;
};

/// d = 1 - 0.01672 cos(0.9856 deg * (doy - 4)).
double earth_sun_distance_from_doy(int doy);

/// Radiometric constants of one band. Thermal-only and reflective-only
/// fields are optional.
struct BandCalibration {
    std::string band_id;
    double gain = 1.0;
    double bias = 0.0;
    std::optional<double> k1;
    std::optional<double> k2;
    std::optional<double> e0;
    std::optional<double> lambda_um;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

/// Built-in calibration table for a sensor (gain = (Lmax - Lmin)/255,
/// bias = Lmin). TM band 6 is "6"; ETM+ thermal bands are "6.1" (low gain)
/// and "6.2" (high gain).
const std::vector<BandCalibration>& default_calibrations(Sensor sensor);

/// Band ids used by default for red, NIR, thermal and classification.
struct DefaultBands {
    std::string red;
    std::string nir;
    std::string thermal;
    std::vector<std::string> classification;
};
DefaultBands default_bands(Sensor sensor);

struct SceneMetadata {
    SceneContext context;
    std::vector<BandCalibration> bands;

    /// Throws std::out_of_range naming the band when absent.
    const BandCalibration& band(std::string_view id) const;
    const BandCalibration* find_band(std::string_view id) const;
};

/// What a pipeline needs from the metadata beyond the always-required keys.
enum class MetadataNeeds { Basic, Reflectance, Lst };

/// Parses the `key = value` format:
///
///     # comment
///     sensor = TM
///     sun_zenith_deg = 40
///     doy = 232
///     water_vapour_g_cm2 = 2.0
///     [band 6]
///     gain = 0.055158
///
/// Per-band sections override or extend the sensor's default table.
/// Throws FormatError with `source:line:` prefixes.
SceneMetadata parse_scene_metadata(std::string_view text, std::string_view source = "<metadata>");
SceneMetadata read_scene_metadata(const std::filesystem::path& path);

/// Checks the keys a pipeline depends on; throws FormatError naming the key.
void require_metadata(const SceneMetadata& meta, MetadataNeeds needs,
                      std::span<const std::string> band_ids = {});

std::string format_scene_metadata(const SceneMetadata& meta);

} // namespace lstgrid
