#include "lstgrid/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lstgrid/error.hpp"
#include "text_util.hpp"

namespace lstgrid {

std::string_view to_string(Sensor s) {
    return s == Sensor::TM ? "TM" : "ETM+";
}

std::optional<Sensor> parse_sensor(std::string_view text) {
    const std::string t = detail::lower(detail::trim(text));
    if (t == "tm") return Sensor::TM;
    if (t == "etm+" || t == "etm") return Sensor::ETMPlus;
    return std::nullopt;
}

double earth_sun_distance_from_doy(int doy) {
    constexpr double deg = std::numbers::pi / 180.0;
    return 1.0 - 0.01672 * std::cos(0.9856 * deg * (doy - 4));
}

double SceneContext::earth_sun_distance() const {
    return earth_sun_distance_au ? *earth_sun_distance_au
                                 : earth_sun_distance_from_doy(acquisition_doy);
}

double SceneContext::cos_sun_zenith() const {
    return std::cos(sun_zenith_deg * std::numbers::pi / 180.0);
}

void BandCalibration::validate() const {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("band " + band_id + ": " + what);
    };
    if (!(gain > 0.0)) fail("gain must be > 0");
    if (k1 && !(*k1 > 0.0)) fail("k1 must be > 0");
    if (k2 && !(*k2 > 0.0)) fail("k2 must be > 0");
    if (e0 && !(*e0 > 0.0)) fail("e0 must be > 0");
    if (lambda_um && !(*lambda_um > 0.0)) fail("lambda_um must be > 0");
}

namespace {

struct RadianceRange {
    const char* id;
    double lmin;
    double lmax;
    std::optional<double> e0;
};

BandCalibration from_range(const RadianceRange& r) {
    BandCalibration c;
    c.band_id = r.id;
    c.gain = (r.lmax - r.lmin) / 255.0;
    c.bias = r.lmin;
    c.e0 = r.e0;
    return c;
}

std::vector<BandCalibration> make_tm_table() {
    // Landsat-5 TM, current (post May 2003) processing LMIN/LMAX and ESUN.
    const RadianceRange ranges[] = {
        {"1", -1.52, 193.0, 1983.0}, {"2", -2.84, 365.0, 1796.0},
        {"3", -1.17, 264.0, 1536.0}, {"4", -1.51, 221.0, 1031.0},
        {"5", -0.37, 30.2, 220.0},   {"6", 1.2378, 15.303, std::nullopt},
        {"7", -0.15, 16.5, 83.44},
    };
    std::vector<BandCalibration> table;
    for (const auto& r : ranges) table.push_back(from_range(r));
    auto& b6 = table[5];
    b6.k1 = 607.76;
    b6.k2 = 1260.56;
    b6.lambda_um = 11.457;
    return table;
}

std::vector<BandCalibration> make_etm_table() {
    // Landsat-7 ETM+, high gain for reflective bands; 6.1 low gain, 6.2 high gain.
    const RadianceRange ranges[] = {
        {"1", -6.2, 191.6, 1997.0},  {"2", -6.4, 196.5, 1812.0},
        {"3", -5.0, 152.9, 1533.0},  {"4", -5.1, 157.4, 1039.0},
        {"5", -1.0, 31.06, 230.8},   {"6.1", 0.0, 17.04, std::nullopt},
        {"6.2", 3.2, 12.65, std::nullopt}, {"7", -0.35, 10.80, 84.90},
    };
    std::vector<BandCalibration> table;
    for (const auto& r : ranges) table.push_back(from_range(r));
    for (auto& b : table) {
        if (b.band_id == "6.1" || b.band_id == "6.2") {
            b.k1 = 666.09;
            b.k2 = 1282.71;
            b.lambda_um = 11.269;
        }
    }
    return table;
}

} // namespace

const std::vector<BandCalibration>& default_calibrations(Sensor sensor) {
    static const std::vector<BandCalibration> tm = make_tm_table();
    static const std::vector<BandCalibration> etm = make_etm_table();
    return sensor == Sensor::TM ? tm : etm;
}

DefaultBands default_bands(Sensor sensor) {
    if (sensor == Sensor::TM) return {"3", "4", "6", {"4", "5", "1"}};
    return {"3", "4", "6.1", {"7", "4", "2"}};
}

const BandCalibration* SceneMetadata::find_band(std::string_view id) const {
    for (const auto& b : bands)
        if (b.band_id == id) return &b;
    return nullptr;
}

const BandCalibration& SceneMetadata::band(std::string_view id) const {
    if (const auto* b = find_band(id)) return *b;
    throw std::out_of_range("no calibration for band '" + std::string(id) + "'");
}

SceneMetadata parse_scene_metadata(std::string_view text, std::string_view source) {
    const std::string src(source);
    auto fail = [&](std::size_t line, const std::string& msg) -> void {
        throw FormatError(src + ":" + std::to_string(line) + ": " + msg);
    };

    std::optional<Sensor> sensor;
    std::optional<double> zenith;
    std::optional<int> doy;
    std::optional<double> distance;
    std::optional<double> water;
    // Band overrides in file order; merged onto the sensor table afterwards.
    std::vector<std::pair<BandCalibration, std::vector<std::string>>> overrides;
    std::vector<std::size_t> override_lines;

    BandCalibration* current = nullptr;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) return;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            const auto words = detail::split_ws(line.substr(1, line.size() - 2));
            if (words.size() != 2 || !detail::iequals(words[0], "band"))
                fail(line_no, "expected [band <id>]");
            BandCalibration cal;
            cal.band_id = std::string(words[1]);
            overrides.push_back({cal, {}});
            override_lines.push_back(line_no);
            current = &overrides.back().first;
            return;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        auto number = [&]() {
            const auto v = detail::parse_double(value);
            if (!v || !std::isfinite(*v))
                fail(line_no, "unparsable number '" + std::string(value) + "' for " + key);
            return *v;
        };

        if (current) {
            auto& fields = overrides.back().second;
            if (key == "gain") current->gain = number();
            else if (key == "bias") current->bias = number();
            else if (key == "k1") current->k1 = number();
            else if (key == "k2") current->k2 = number();
            else if (key == "e0") current->e0 = number();
            else if (key == "lambda_um") current->lambda_um = number();
            else fail(line_no, "unknown band key '" + key + "'");
            fields.push_back(key);
            return;
        }

        if (key == "sensor") {
            sensor = parse_sensor(value);
            if (!sensor) fail(line_no, "unknown sensor '" + std::string(value) + "' (TM or ETM+)");
        } else if (key == "sun_zenith_deg") {
            zenith = number();
            if (!(*zenith >= 0.0 && *zenith < 90.0))
                fail(line_no, "sun_zenith_deg must be in [0, 90)");
        } else if (key == "doy" || key == "acquisition_doy") {
            const auto v = detail::parse_int<int>(value);
            if (!v) fail(line_no, "unparsable integer '" + std::string(value) + "' for doy");
            if (*v < 1 || *v > 366) fail(line_no, "doy must be in 1..366");
            doy = *v;
        } else if (key == "earth_sun_distance_au") {
            distance = number();
            if (!(*distance >= 0.9 && *distance <= 1.1))
                fail(line_no, "earth_sun_distance_au must be in [0.9, 1.1]");
        } else if (key == "water_vapour_g_cm2" || key == "w") {
            water = number();
            if (*water < 0.0) fail(line_no, "water_vapour_g_cm2 must be >= 0");
        } else {
            fail(line_no, "unknown key '" + key + "'");
        }
    });

    auto missing = [&](const char* key) {
        throw FormatError(src + ": missing required key '" + std::string(key) + "'");
    };
    if (!sensor) missing("sensor");
    if (!zenith) missing("sun_zenith_deg");
    if (!doy) missing("doy");

    SceneMetadata meta;
    meta.context.sensor = *sensor;
    meta.context.sun_zenith_deg = *zenith;
    meta.context.acquisition_doy = *doy;
    meta.context.earth_sun_distance_au = distance;
    meta.context.water_vapour_g_cm2 = water;
    meta.bands = default_calibrations(*sensor);

    for (std::size_t i = 0; i < overrides.size(); ++i) {
        const auto& [cal, fields] = overrides[i];
        BandCalibration* target = nullptr;
        for (auto& b : meta.bands)
            if (b.band_id == cal.band_id) target = &b;
        if (!target) {
            if (std::find(fields.begin(), fields.end(), "gain") == fields.end())
                throw FormatError(src + ":" + std::to_string(override_lines[i]) + ": band " +
                                  cal.band_id + " has no default calibration; gain is required");
            meta.bands.push_back(cal);
            meta.bands.back().gain = 1.0;
            meta.bands.back().bias = 0.0;
            target = &meta.bands.back();
        }
        for (const auto& f : fields) {
            if (f == "gain") target->gain = cal.gain;
            else if (f == "bias") target->bias = cal.bias;
            else if (f == "k1") target->k1 = cal.k1;
            else if (f == "k2") target->k2 = cal.k2;
            else if (f == "e0") target->e0 = cal.e0;
            else if (f == "lambda_um") target->lambda_um = cal.lambda_um;
        }
        try {
            target->validate();
        } catch (const std::invalid_argument& e) {
            throw FormatError(src + ":" + std::to_string(override_lines[i]) + ": " + e.what());
        }
    }
    return meta;
}

SceneMetadata read_scene_metadata(const std::filesystem::path& path) {
    return parse_scene_metadata(detail::read_file(path.string()), path.string());
}

void require_metadata(const SceneMetadata& meta, MetadataNeeds needs,
                      std::span<const std::string> band_ids) {
    if (needs == MetadataNeeds::Lst && !meta.context.water_vapour_g_cm2)
        throw FormatError("metadata: missing required key 'water_vapour_g_cm2' for LST");
    for (const auto& id : band_ids) {
        const auto* b = meta.find_band(id);
        if (!b) throw FormatError("metadata: no calibration for band '" + id + "'");
        if (needs == MetadataNeeds::Reflectance && !b->e0)
            throw FormatError("metadata: band '" + id + "' needs e0");
        if (needs == MetadataNeeds::Lst) {
            if (!b->k1) throw FormatError("metadata: band '" + id + "' needs k1");
            if (!b->k2) throw FormatError("metadata: band '" + id + "' needs k2");
            if (!b->lambda_um) throw FormatError("metadata: band '" + id + "' needs lambda_um");
        }
    }
}

std::string format_scene_metadata(const SceneMetadata& meta) {
    std::ostringstream out;
    out.precision(17);
    const auto& c = meta.context;
    out << "sensor = " << to_string(c.sensor) << '\n'
        << "sun_zenith_deg = " << c.sun_zenith_deg << '\n'
        << "doy = " << c.acquisition_doy << '\n';
    if (c.earth_sun_distance_au) out << "earth_sun_distance_au = " << *c.earth_sun_distance_au << '\n';
    if (c.water_vapour_g_cm2) out << "water_vapour_g_cm2 = " << *c.water_vapour_g_cm2 << '\n';
    for (const auto& b : meta.bands) {
        out << "\n[band " << b.band_id << "]\n"
            << "gain = " << b.gain << '\n'
            << "bias = " << b.bias << '\n';
        if (b.k1) out << "k1 = " << *b.k1 << '\n';
        if (b.k2) out << "k2 = " << *b.k2 << '\n';
        if (b.e0) out << "e0 = " << *b.e0 << '\n';
        if (b.lambda_um) out << "lambda_um = " << *b.lambda_um << '\n';
    }
    return out.str();
}

} // namespace lstgrid
