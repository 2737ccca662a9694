#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lstgrid/raster.hpp"

using namespace lstgrid;

TEST(RasterGrid, ShapeAndAddressing) {
    RasterGrid g(3, 2, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(g.width(), 3u);
    EXPECT_EQ(g.height(), 2u);
    EXPECT_EQ(g.size(), 6u);
    EXPECT_EQ(g.nodata(), kDefaultNodata);
    EXPECT_EQ(g.at(1, 0), 4.0);
    g.set(0, 2, 9.0);
    EXPECT_EQ(g.row(0)[2], 9.0);
    EXPECT_THROW(RasterGrid(2, 2, {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(g.at(2, 0), std::out_of_range);
}

TEST(RasterGrid, WindowPasteRoundTrip) {
    RasterGrid g(5, 4);
    for (std::size_t i = 0; i < g.size(); ++i) g.samples()[i] = static_cast<double>(i);
    const auto w = g.window(1, 2, 2, 3);
    EXPECT_EQ(w.width(), 3u);
    EXPECT_EQ(w.at(0, 0), g.at(1, 2));
    EXPECT_EQ(w.at(1, 2), g.at(2, 4));
    RasterGrid copy(5, 4);
    copy.paste(g.window(0, 2, 0, 5), 0, 0);
    copy.paste(g.window(2, 2, 0, 5), 2, 0);
    EXPECT_TRUE(bit_identical(copy, g));
    EXPECT_THROW(g.window(3, 2, 0, 5), std::out_of_range);
}

TEST(RasterGrid, BitIdenticalTreatsNanBitwise) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    RasterGrid a(2, 1, {nan, 1.0});
    RasterGrid b(2, 1, {nan, 1.0});
    EXPECT_TRUE(bit_identical(a, b));
    RasterGrid c(2, 1, {nan, -0.0});
    RasterGrid d(2, 1, {nan, 0.0});
    EXPECT_FALSE(bit_identical(c, d));
}

TEST(Stats, SimpleGrid) {
    const auto s = stats(RasterGrid(2, 2, {1, 2, 3, 4}));
    EXPECT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 4.0);
    EXPECT_NEAR(s.stddev, std::sqrt(1.25), 1e-15);
}

TEST(Stats, NodataExcluded) {
    const auto s = stats(RasterGrid(2, 2, {1, -9999, 3, -9999}));
    EXPECT_EQ(s.count, 2u);
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
}

TEST(Stats, EmptyFlaggedByCount) {
    const auto s = stats(RasterGrid(2, 1, {-9999, -9999}));
    EXPECT_EQ(s.count, 0u);
    EXPECT_TRUE(std::isnan(s.mean));
    EXPECT_EQ(stats(RasterGrid()).count, 0u);
}

TEST(Stats, UniformRandomMeanAgreesWithPlainAccumulation) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RasterGrid g(40, 25);
    double sum = 0.0;
    for (double& v : g.samples()) {
        v = u(rng);
        sum += v;
    }
    const auto s = stats(g);
    EXPECT_NEAR(s.mean, sum / 1000.0, 1e-12);
    // 3 sigma of the sample mean of U(0,1).
    EXPECT_NEAR(s.mean, 0.5, 3.0 * std::sqrt(1.0 / 12.0) / std::sqrt(1000.0));
}

TEST(Stats, PermutationInvariantAndBounding) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(10.0, 3.0);
    std::vector<double> v(997);
    for (auto& x : v) x = n(rng);
    for (std::size_t i = 0; i < v.size(); i += 13) v[i] = kDefaultNodata;
    const auto a = stats(RasterGrid(v.size(), 1, v));
    std::shuffle(v.begin(), v.end(), rng);
    const RasterGrid shuffled(v.size(), 1, v);
    const auto b = stats(shuffled);
    EXPECT_EQ(a.count, b.count);
    EXPECT_EQ(a.min, b.min);
    EXPECT_EQ(a.max, b.max);
    EXPECT_NEAR(a.mean, b.mean, 1e-12);
    EXPECT_NEAR(a.stddev, b.stddev, 1e-12);
    EXPECT_LE(a.min, a.mean);
    EXPECT_LE(a.mean, a.max);
    for (double x : shuffled.samples())
        if (!shuffled.is_nodata(x)) {
            EXPECT_LE(a.min, x);
            EXPECT_GE(a.max, x);
        }
}

TEST(Histogram, CountsPerDn) {
    const auto h = dn_histogram(RasterGrid(3, 1, {0, 0, 255}), 255);
    EXPECT_EQ(h.counts.size(), 256u);
    EXPECT_EQ(h.counts[0], 2u);
    EXPECT_EQ(h.counts[255], 1u);
    EXPECT_EQ(h.total, 3u);
}

TEST(Histogram, RejectsBadSamples) {
    EXPECT_THROW(dn_histogram(RasterGrid(1, 1, std::vector<double>{256}), 255), std::invalid_argument);
    EXPECT_THROW(dn_histogram(RasterGrid(1, 1, std::vector<double>{-1}), 255), std::invalid_argument);
    EXPECT_THROW(dn_histogram(RasterGrid(1, 1, std::vector<double>{1.5}), 255), std::invalid_argument);
    EXPECT_NO_THROW(dn_histogram(RasterGrid(1, 1, std::vector<double>{kDefaultNodata}), 255));
}

TEST(Histogram, MergeOfAnyPartitionEqualsWhole) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dn(0, 255);
    for (int trial = 0; trial < 20; ++trial) {
        RasterGrid g(37, 29);
        for (double& v : g.samples()) v = dn(rng) == 0 ? kDefaultNodata : dn(rng);
        const auto whole = dn_histogram(g, 255);
        std::uniform_int_distribution<std::size_t> cut(0, g.height());
        std::size_t a = cut(rng), b = cut(rng);
        if (a > b) std::swap(a, b);
        DnHistogram merged(255);
        for (auto [r0, r1] : {std::pair{std::size_t{0}, a}, {a, b}, {b, g.height()}})
            if (r1 > r0) merged.merge(dn_histogram(g.window(r0, r1 - r0, 0, g.width()), 255));
        EXPECT_EQ(merged, whole);
        std::uint64_t sum = 0;
        for (auto c : whole.counts) sum += c;
        EXPECT_EQ(sum, whole.total);
    }
}

TEST(Histogram, MergeRejectsDifferentRanges) {
    DnHistogram a(255), b(1023);
    EXPECT_THROW(a.merge(b), std::invalid_argument);
}

TEST(Histogram, LargeGridTotalExcludesNodata) {
    RasterGrid g(3000, 3000, kDefaultNodata, 17.0);
    std::size_t nodata = 0;
    auto s = g.samples();
    for (std::size_t i = 0; i < s.size(); i += 1009) {
        s[i] = kDefaultNodata;
        ++nodata;
    }
    EXPECT_EQ(dn_histogram(g, 255).total, 9'000'000u - nodata);
}
