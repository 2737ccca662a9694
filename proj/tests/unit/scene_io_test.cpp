#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lstgrid/error.hpp"
#include "lstgrid/io/lst_text.hpp"
#include "lstgrid/scene.hpp"

using namespace lstgrid;

namespace {

const char* kMinimal = R"(# 20 Aug 1989
sensor = TM
sun_zenith_deg = 40
doy = 232
water_vapour_g_cm2 = 2.0
)";

std::string error_of(std::string_view text) {
    try {
        parse_scene_metadata(text, "meta.txt");
    } catch (const FormatError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(SceneMetadata, MinimalFile) {
    const auto m = parse_scene_metadata(kMinimal);
    EXPECT_EQ(m.context.sensor, Sensor::TM);
    EXPECT_EQ(m.context.acquisition_doy, 232);
    EXPECT_DOUBLE_EQ(m.context.sun_zenith_deg, 40.0);
    ASSERT_TRUE(m.context.water_vapour_g_cm2);
    EXPECT_DOUBLE_EQ(*m.context.water_vapour_g_cm2, 2.0);
    EXPECT_FALSE(m.context.earth_sun_distance_au);
    EXPECT_NO_THROW(require_metadata(m, MetadataNeeds::Lst, std::vector<std::string>{"6"}));
}

TEST(SceneMetadata, DistanceFromDayOfYear) {
    const auto m = parse_scene_metadata(kMinimal);
    // Independent evaluation of 1 - 0.01672 cos(0.9856 deg * (doy - 4)).
    const double expected = 1.0 - 0.01672 * std::cos(0.9856 * 228.0 * std::numbers::pi / 180.0);
    EXPECT_NEAR(m.context.earth_sun_distance(), expected, 1e-15);
    EXPECT_NEAR(m.context.earth_sun_distance(), 1.0118811182575433, 1e-12);
}

TEST(SceneMetadata, ExplicitDistanceWins) {
    const auto m = parse_scene_metadata(std::string(kMinimal) + "earth_sun_distance_au = 1.0106\n");
    EXPECT_DOUBLE_EQ(m.context.earth_sun_distance(), 1.0106);
}

TEST(SceneMetadata, MissingWaterVapourNamedForLst) {
    const auto m = parse_scene_metadata("sensor = TM\nsun_zenith_deg = 40\ndoy = 232\n");
    try {
        require_metadata(m, MetadataNeeds::Lst, std::vector<std::string>{"6"});
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("water_vapour_g_cm2"), std::string::npos);
    }
    EXPECT_NO_THROW(require_metadata(m, MetadataNeeds::Reflectance, std::vector<std::string>{"3"}));
}

TEST(SceneMetadata, ErrorsNameKeyAndLine) {
    EXPECT_NE(error_of("sun_zenith_deg = 40\ndoy = 1\n").find("'sensor'"), std::string::npos);
    EXPECT_NE(error_of("sensor = TM\ndoy = 1\n").find("'sun_zenith_deg'"), std::string::npos);
    EXPECT_NE(error_of("sensor = TM\nsun_zenith_deg = 90\ndoy = 1\n").find("meta.txt:2"),
              std::string::npos);
    EXPECT_NE(error_of("sensor = TM\nsun_zenith_deg = abc\n").find("unparsable"), std::string::npos);
    EXPECT_NE(error_of("sensor = TM\ncolour = red\n").find("meta.txt:2: unknown key"),
              std::string::npos);
    EXPECT_NE(error_of("sensor = MSS\n").find("unknown sensor"), std::string::npos);
    EXPECT_NE(error_of("sensor = TM\nsun_zenith_deg = 1\ndoy = 400\n").find("doy"),
              std::string::npos);
    EXPECT_NE(error_of("sensor = TM\nsun_zenith_deg = 1\ndoy = 1\nearth_sun_distance_au = 1.5\n")
                  .find("earth_sun_distance_au"),
              std::string::npos);
    EXPECT_NE(error_of("sensor = TM\nsun_zenith_deg = 1\ndoy = 1\nw = -1\n").find("water_vapour"),
              std::string::npos);
}

TEST(SceneMetadata, BandSectionsOverrideDefaults) {
    const auto m = parse_scene_metadata(std::string(kMinimal) +
                                        "[band 6]\ngain = 0.05\n[band 3]\ne0 = 1554\n");
    EXPECT_DOUBLE_EQ(m.band("6").gain, 0.05);
    EXPECT_DOUBLE_EQ(*m.band("6").k1, 607.76);
    EXPECT_DOUBLE_EQ(*m.band("3").e0, 1554.0);
    EXPECT_NE(error_of(std::string(kMinimal) + "[band 6]\ngain = -1\n").find("meta.txt:6"),
              std::string::npos);
    EXPECT_NE(error_of(std::string(kMinimal) + "[band 9]\nk1 = 5\n").find("gain is required"),
              std::string::npos);
    EXPECT_NE(error_of(std::string(kMinimal) + "[band 6]\nfoo = 1\n").find("unknown band key"),
              std::string::npos);
}

TEST(SceneMetadata, FormatRoundTrip) {
    const auto m = parse_scene_metadata(std::string(kMinimal) + "[band 6]\ngain = 0.0551\n");
    const auto again = parse_scene_metadata(format_scene_metadata(m));
    EXPECT_EQ(again.context.acquisition_doy, m.context.acquisition_doy);
    ASSERT_EQ(again.bands.size(), m.bands.size());
    for (std::size_t i = 0; i < m.bands.size(); ++i) {
        EXPECT_EQ(again.bands[i].band_id, m.bands[i].band_id);
        EXPECT_EQ(again.bands[i].gain, m.bands[i].gain);
        EXPECT_EQ(again.bands[i].bias, m.bands[i].bias);
        EXPECT_EQ(again.bands[i].k1, m.bands[i].k1);
        EXPECT_EQ(again.bands[i].e0, m.bands[i].e0);
    }
}

// Values transcribed from the published Landsat 5 TM / Landsat 7 ETM+
// radiometric calibration summary.
TEST(DefaultCalibration, ThermalConstants) {
    const auto tm = default_calibrations(Sensor::TM);
    SceneMetadata m{{}, tm};
    const auto& b6 = m.band("6");
    EXPECT_NEAR(b6.gain, 0.055158, 5e-7);
    EXPECT_DOUBLE_EQ(b6.bias, 1.2378);
    EXPECT_DOUBLE_EQ(*b6.k1, 607.76);
    EXPECT_DOUBLE_EQ(*b6.k2, 1260.56);
    EXPECT_DOUBLE_EQ(*b6.lambda_um, 11.457);

    SceneMetadata e{{}, default_calibrations(Sensor::ETMPlus)};
    const auto& e61 = e.band("6.1");
    EXPECT_DOUBLE_EQ(*e61.k1, 666.09);
    EXPECT_DOUBLE_EQ(*e61.k2, 1282.71);
    EXPECT_DOUBLE_EQ(*e61.lambda_um, 11.269);
    EXPECT_TRUE(e.find_band("6.2"));
    for (const auto& b : tm) EXPECT_NO_THROW(b.validate());
}

TEST(DefaultCalibration, BandSets) {
    const auto tm = default_bands(Sensor::TM);
    EXPECT_EQ(tm.red, "3");
    EXPECT_EQ(tm.nir, "4");
    EXPECT_EQ(tm.thermal, "6");
    EXPECT_EQ(tm.classification, (std::vector<std::string>{"4", "5", "1"}));
    const auto etm = default_bands(Sensor::ETMPlus);
    EXPECT_EQ(etm.thermal, "6.1");
    EXPECT_EQ(etm.classification, (std::vector<std::string>{"7", "4", "2"}));
}

TEST(LstText, TwoDecimalsAndNa) {
    std::ostringstream out;
    io::write_lst_text(RasterGrid(2, 1, {38.64, 41.58}), out);
    EXPECT_EQ(out.str(), "38.64 41.58\n");
    std::ostringstream na;
    io::write_lst_text(RasterGrid(2, 2, kDefaultNodata, kDefaultNodata), na);
    EXPECT_EQ(na.str(), "NA NA\nNA NA\n");
}

TEST(LstText, ReparseWithinHalfHundredth) {
    RasterGrid g(7, 5);
    double v = -12.3456;
    for (auto& s : g.samples()) s = (v += 3.14159);
    g.set(2, 3, kDefaultNodata);
    std::ostringstream out;
    io::write_lst_text(g, out);
    const auto back = io::parse_lst_text(out.str());
    ASSERT_TRUE(back.same_shape(g));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_nodata(g.samples()[i])) {
            EXPECT_TRUE(back.is_nodata(back.samples()[i]));
            continue;
        }
        EXPECT_NEAR(back.samples()[i], g.samples()[i], 0.005 + 1e-12);
    }
}

TEST(LstText, RaggedRowsRejected) {
    EXPECT_THROW(io::parse_lst_text("1.00 2.00\n3.00\n"), FormatError);
}
