#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lstgrid/indices.hpp"
#include "oracle/scalar_oracle.hpp"

using namespace lstgrid;

TEST(Ndvi, Scalar) {
    EXPECT_EQ(ndvi(0.3, 0.3), 0.0);
    EXPECT_NEAR(ndvi(0.05, 0.40), 0.77778, 5e-6);
    EXPECT_NEAR(ndvi(0.05, 0.40), oracle::ndvi(0.05, 0.40), 1e-15);
    EXPECT_TRUE(std::isnan(ndvi(0.0, 0.0)));
}

TEST(Ndvi, GridNodataRules) {
    const RasterGrid red(4, 1, {0.1, 0.0, kDefaultNodata, 0.2});
    const RasterGrid nir(4, 1, {0.3, 0.0, 0.5, kDefaultNodata});
    const auto n = ndvi(red, nir);
    EXPECT_NEAR(n.at(0, 0), 0.5, 1e-15);
    EXPECT_TRUE(n.is_nodata(n.at(0, 1)));
    EXPECT_TRUE(n.is_nodata(n.at(0, 2)));
    EXPECT_TRUE(n.is_nodata(n.at(0, 3)));
    EXPECT_THROW(ndvi(RasterGrid(2, 1), RasterGrid(1, 2)), std::invalid_argument);
}

TEST(Ndvi, RangeProperty) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    for (int i = 0; i < 10000; ++i) {
        const double v = ndvi(u(rng), u(rng));
        if (std::isnan(v)) continue;
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Emissivity, FormulaAndBranches) {
    const EmissivityConfig cfg;
    EXPECT_NEAR(lse(0.5), 0.976822, 5e-7);
    EXPECT_NEAR(lse(0.5), oracle::emissivity(0.5), 1e-15);
    EXPECT_NEAR(lse(0.157), 0.922379, 5e-7);
    EXPECT_EQ(lse(-0.3), cfg.eps_water);
    EXPECT_EQ(lse(0.0), cfg.eps_soil);
    EXPECT_EQ(lse(0.1), cfg.eps_soil);
    EXPECT_EQ(lse(0.8), cfg.eps_veg);
    EXPECT_NEAR(lse(0.727), 1.0094 + 0.047 * std::log(0.727), 1e-15);
    EXPECT_TRUE(std::isnan(lse(std::nan(""))));
}

TEST(Emissivity, AgreesWithOracleEverywhere) {
    for (int i = -1000; i <= 1000; ++i) {
        const double v = i / 1000.0;
        EXPECT_NEAR(lse(v), oracle::emissivity(v), 1e-15) << v;
    }
}

TEST(Emissivity, MonotoneInsideLogBranch) {
    double last = 0.0;
    for (double v = 0.157; v <= 0.727; v += 0.001) {
        const double e = lse(v);
        EXPECT_GE(e, last);
        last = e;
    }
}

TEST(Emissivity, BoundedWithoutNanOnValidRange) {
    for (int i = -10000; i <= 10000; ++i) {
        const double e = lse(i / 10000.0);
        EXPECT_FALSE(std::isnan(e));
        EXPECT_GT(e, 0.9);
        EXPECT_LT(e, 1.01);
    }
}

TEST(Emissivity, GridAndConfigValidation) {
    const auto e = lse(RasterGrid(3, 1, {0.5, kDefaultNodata, -0.2}));
    EXPECT_NEAR(e.at(0, 0), 0.976822, 5e-7);
    EXPECT_TRUE(e.is_nodata(e.at(0, 1)));
    EXPECT_EQ(e.at(0, 2), 0.995);

    EmissivityConfig bad;
    bad.ndvi_low = 0.8;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = {};
    bad.eps_soil = 0.9;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    EXPECT_NO_THROW(EmissivityConfig{}.validate());
}
