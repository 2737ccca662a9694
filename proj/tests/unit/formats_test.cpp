#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "lstgrid/classified.hpp"
#include "lstgrid/error.hpp"
#include "lstgrid/io/ascii_grid.hpp"
#include "lstgrid/io/raster_file.hpp"
#include "lstgrid/io/tiff.hpp"

using namespace lstgrid;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto p = fs::temp_directory_path() /
             ("lstgrid_formats_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
              "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(p);
    return p;
}

std::string format_error(std::string_view text) {
    try {
        io::parse_ascii_grid(text, "g.asc");
    } catch (const FormatError& e) {
        return e.what();
    }
    return {};
}

// Minimal hand-assembled TIFF: one strip of 8-bit samples.
struct TiffBuilder {
    bool big_endian = false;
    std::vector<std::uint8_t> out;
    struct Entry {
        std::uint16_t tag, type;
        std::uint32_t count, value;
    };
    std::vector<Entry> entries;

    void put16(std::size_t at, std::uint16_t v) {
        if (big_endian) {
            out[at] = v >> 8;
            out[at + 1] = v & 0xff;
        } else {
            out[at] = v & 0xff;
            out[at + 1] = v >> 8;
        }
    }
    void put32(std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            out[at + i] = big_endian ? (v >> (24 - 8 * i)) & 0xff : (v >> (8 * i)) & 0xff;
    }

    std::vector<std::uint8_t> build(std::uint32_t w, std::uint32_t h,
                                    const std::vector<std::uint8_t>& pixels) {
        const std::uint32_t ifd = 8 + static_cast<std::uint32_t>(pixels.size());
        out.assign(8, 0);
        out[0] = out[1] = big_endian ? 'M' : 'I';
        put16(2, 42);
        put32(4, ifd);
        out.insert(out.end(), pixels.begin(), pixels.end());
        std::vector<Entry> all = {{256, 3, 1, w}, {257, 3, 1, h}, {258, 3, 1, 8}, {259, 3, 1, 1},
                                  {262, 3, 1, 1}, {273, 4, 1, 8}, {277, 3, 1, 1}, {278, 3, 1, h},
                                  {279, 4, 1, static_cast<std::uint32_t>(pixels.size())}};
        for (const auto& e : entries) {
            bool replaced = false;
            for (auto& a : all)
                if (a.tag == e.tag) a = e, replaced = true;
            if (!replaced) all.push_back(e);
        }
        std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.tag < b.tag; });
        const std::size_t base = out.size();
        out.resize(base + 2 + 12 * all.size() + 4, 0);
        put16(base, static_cast<std::uint16_t>(all.size()));
        for (std::size_t i = 0; i < all.size(); ++i) {
            const std::size_t at = base + 2 + 12 * i;
            put16(at, all[i].tag);
            put16(at + 2, all[i].type);
            put32(at + 4, all[i].count);
            if (all[i].type == 3) put16(at + 8, static_cast<std::uint16_t>(all[i].value));
            else put32(at + 8, all[i].value);
        }
        return out;
    }
};

RasterGrid random_grid(std::mt19937_64& rng, std::size_t w, std::size_t h, bool integral,
                       double max) {
    std::uniform_real_distribution<double> u(0.0, max);
    std::bernoulli_distribution hole(0.1);
    RasterGrid g(w, h);
    for (double& v : g.samples()) {
        v = integral ? std::floor(u(rng)) : u(rng) - max / 2;
        if (hole(rng)) v = g.nodata();
    }
    return g;
}

} // namespace

TEST(AsciiGrid, ParsesHeaderAndSamples) {
    io::AsciiGridGeometry geo;
    const auto g = io::parse_ascii_grid(
        "NCOLS 2\nnrows 1\nxllcorner 10\nyllcorner 20\ncellsize 30\n5 7\n", "g", &geo);
    EXPECT_EQ(g.width(), 2u);
    EXPECT_EQ(g.height(), 1u);
    EXPECT_EQ(g.at(0, 0), 5.0);
    EXPECT_EQ(g.at(0, 1), 7.0);
    EXPECT_EQ(g.nodata(), kDefaultNodata);
    EXPECT_EQ(geo.cellsize, 30.0);
}

TEST(AsciiGrid, NodataHonoured) {
    const auto g = io::parse_ascii_grid(
        "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n1 -9999\n");
    EXPECT_EQ(stats(g).count, 1u);
}

TEST(AsciiGrid, ErrorsCarryLineNumbers) {
    const std::string head = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n";
    EXPECT_NE(format_error(head + "1 2\n3\n").find("g.asc"), std::string::npos);
    EXPECT_NE(format_error(head + "1 2\n3 x\n").find("g.asc:7"), std::string::npos);
    EXPECT_NE(format_error("ncols two\n").find("g.asc:1"), std::string::npos);
    EXPECT_NE(format_error("ncols 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n").find("nrows"),
              std::string::npos);
    EXPECT_NE(format_error(head + "1 2\n3 4 5\n").find("g.asc:7"), std::string::npos);
}

TEST(AsciiGrid, RandomRoundTripIsBitExact) {
    std::mt19937_64 rng(64);
    const auto dir = temp_dir();
    auto g = random_grid(rng, 64, 64, false, 1e6);
    g.set(0, 0, 1.0 / 3.0);
    g.set(0, 1, -0.0);
    g.set(0, 2, 5e-310);
    io::write_ascii_grid(g, dir / "g.asc", {100.5, 200.25, 30});
    io::AsciiGridGeometry geo;
    const auto back = io::read_ascii_grid(dir / "g.asc", &geo);
    EXPECT_TRUE(bit_identical(g, back));
    EXPECT_EQ(geo.xllcorner, 100.5);
    EXPECT_EQ(geo.yllcorner, 200.25);
    fs::remove_all(dir);
}

TEST(Tiff, EightBitGrayscaleBothByteOrders) {
    for (bool be : {false, true}) {
        TiffBuilder b;
        b.big_endian = be;
        const auto g = io::decode_tiff(b.build(2, 2, {0, 1, 2, 3}));
        EXPECT_EQ(g.width(), 2u);
        EXPECT_EQ(std::vector<double>(g.samples().begin(), g.samples().end()),
                  (std::vector<double>{0, 1, 2, 3}));
    }
}

TEST(Tiff, UnsupportedLayoutsNameTheTag) {
    auto message = [](TiffBuilder b) {
        try {
            io::decode_tiff(b.build(2, 2, {0, 1, 2, 3}));
        } catch (const FormatError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    TiffBuilder lzw;
    lzw.entries = {{259, 3, 1, 5}};
    EXPECT_NE(message(lzw).find("Compression"), std::string::npos);
    TiffBuilder tiled;
    tiled.entries = {{322, 3, 1, 16}};
    EXPECT_NE(message(tiled).find("TileWidth"), std::string::npos);
    TiffBuilder rgb;
    rgb.entries = {{277, 3, 1, 3}};
    EXPECT_NE(message(rgb).find("SamplesPerPixel"), std::string::npos);
    TiffBuilder twelve;
    twelve.entries = {{258, 3, 1, 12}};
    EXPECT_NE(message(twelve).find("BitsPerSample"), std::string::npos);
    EXPECT_THROW(io::decode_tiff(std::vector<std::uint8_t>{'I', 'I', 42}), FormatError);
}

TEST(Tiff, RoundTripEveryTypeWithNodataMask) {
    std::mt19937_64 rng(99);
    std::bernoulli_distribution hole(0.1);
    struct Case {
        io::TiffSampleType type;
        double max;
        double nodata;
    };
    for (const auto& c : {Case{io::TiffSampleType::UInt8, 255, 0},
                          Case{io::TiffSampleType::UInt16, 65535, 65535},
                          Case{io::TiffSampleType::Float32, 1000, kDefaultNodata},
                          Case{io::TiffSampleType::Float64, 1e9, kDefaultNodata}}) {
        const bool integral = c.type == io::TiffSampleType::UInt8 ||
                              c.type == io::TiffSampleType::UInt16;
        std::uniform_real_distribution<double> u(0.0, c.max);
        for (auto [w, h] : {std::pair{1, 1}, {7, 3}, {300, 257}}) {
            RasterGrid g(w, h, c.nodata);
            for (double& v : g.samples()) {
                v = integral ? std::floor(u(rng)) : u(rng) - c.max / 2;
                if (c.type == io::TiffSampleType::Float32) v = static_cast<float>(v);
                if (hole(rng)) v = c.nodata;
            }
            const auto back = io::decode_tiff(io::encode_tiff(g, c.type));
            EXPECT_TRUE(bit_identical(g, back)) << static_cast<int>(c.type) << " " << w << "x" << h;
            EXPECT_EQ(stats(back).count, stats(g).count);
        }
    }
}

TEST(Tiff, SixteenBitConstantGrid) {
    RasterGrid g(5, 4, kDefaultNodata, 40000.0);
    const auto back = io::decode_tiff(io::encode_tiff(g, io::TiffSampleType::UInt16));
    for (double v : back.samples()) EXPECT_EQ(v, 40000.0);
}

TEST(Tiff, IntegerTypesRejectUnrepresentableSamples) {
    EXPECT_THROW(io::encode_tiff(RasterGrid(1, 1, std::vector<double>{256.0}), io::TiffSampleType::UInt8),
                 std::invalid_argument);
    EXPECT_THROW(io::encode_tiff(RasterGrid(1, 1, std::vector<double>{1.5}), io::TiffSampleType::UInt16),
                 std::invalid_argument);
}

TEST(Tiff, FileRoundTripAndDispatch) {
    const auto dir = temp_dir();
    std::mt19937_64 rng(5);
    const auto g = random_grid(rng, 33, 17, false, 500);
    io::write_tiff(g, dir / "g.tif");
    EXPECT_TRUE(bit_identical(io::read_raster(dir / "g.tif"), g));
    io::write_ascii_grid(g, dir / "g.asc");
    EXPECT_TRUE(bit_identical(io::read_raster(dir / "g.asc"), g));
    EXPECT_THROW(io::read_tiff(dir / "missing.tif"), FormatError);
    fs::remove_all(dir);
}

TEST(ClassifiedTiff, PaletteRoundTrip) {
    ClassifiedGrid g(9, 4, {"a", "b", "c", "d", "e", "f", "g"});
    for (std::size_t i = 0; i < g.labels.size(); ++i) g.labels[i] = static_cast<std::uint8_t>(i % 8);
    const auto back = io::decode_classified_tiff(io::encode_classified_tiff(g));
    EXPECT_EQ(back.labels, g.labels);
    EXPECT_EQ(back.width, 9u);
    EXPECT_EQ(back.legend.size(), 7u);
}

TEST(ClassifiedTiff, SevenDistinctColoursPlusBlack) {
    std::set<std::tuple<int, int, int>> colours;
    for (std::size_t k = 0; k <= 7; ++k) {
        const auto c = io::class_color(k);
        colours.insert({c.r, c.g, c.b});
    }
    EXPECT_EQ(colours.size(), 8u);
    const auto zero = io::class_color(0);
    EXPECT_EQ(zero.r + zero.g + zero.b, 0);
}
