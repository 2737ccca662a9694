#include "lstgrid/io/tiff.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "lstgrid/error.hpp"
#include "../text_util.hpp"

namespace lstgrid::io {

namespace {

enum Tag : std::uint16_t {
    kImageWidth = 256,
    kImageLength = 257,
    kBitsPerSample = 258,
    kCompression = 259,
    kPhotometric = 262,
    kStripOffsets = 273,
    kSamplesPerPixel = 277,
    kRowsPerStrip = 278,
    kStripByteCounts = 279,
    kPlanarConfiguration = 284,
    kColorMap = 320,
    kTileWidth = 322,
    kTileLength = 323,
    kTileOffsets = 324,
    kTileByteCounts = 325,
    kSampleFormat = 339,
    kGdalNodata = 42113,
};

enum FieldType : std::uint16_t {
    kByte = 1,
    kAscii = 2,
    kShort = 3,
    kLong = 4,
    kRational = 5,
    kSByte = 6,
    kUndefined = 7,
    kSShort = 8,
    kSLong = 9,
    kSRational = 10,
    kFloat = 11,
    kDouble = 12,
};

std::size_t type_size(std::uint16_t type) {
    switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: case kFloat: return 4;
    case kRational: case kSRational: case kDouble: return 8;
    default: return 0;
    }
}

const char* tag_name(std::uint16_t tag) {
    switch (tag) {
    case kImageWidth: return "ImageWidth";
    case kImageLength: return "ImageLength";
    case kBitsPerSample: return "BitsPerSample";
    case kCompression: return "Compression";
    case kPhotometric: return "PhotometricInterpretation";
    case kStripOffsets: return "StripOffsets";
    case kSamplesPerPixel: return "SamplesPerPixel";
    case kRowsPerStrip: return "RowsPerStrip";
    case kStripByteCounts: return "StripByteCounts";
    case kPlanarConfiguration: return "PlanarConfiguration";
    case kTileWidth: return "TileWidth";
    case kTileLength: return "TileLength";
    case kTileOffsets: return "TileOffsets";
    case kTileByteCounts: return "TileByteCounts";
    case kSampleFormat: return "SampleFormat";
    default: return "?";
    }
}

// ---------------------------------------------------------------- writing

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put64(std::vector<std::uint8_t>& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Entry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::vector<std::uint8_t> data; // little-endian encoded values
};

Entry short_entry(std::uint16_t tag, std::initializer_list<std::uint16_t> values) {
    Entry e{tag, kShort, static_cast<std::uint32_t>(values.size()), {}};
    for (auto v : values) put16(e.data, v);
    return e;
}

Entry long_entry(std::uint16_t tag, const std::vector<std::uint32_t>& values) {
    Entry e{tag, kLong, static_cast<std::uint32_t>(values.size()), {}};
    for (auto v : values) put32(e.data, v);
    return e;
}

Entry ascii_entry(std::uint16_t tag, const std::string& text) {
    Entry e{tag, kAscii, static_cast<std::uint32_t>(text.size() + 1), {}};
    e.data.assign(text.begin(), text.end());
    e.data.push_back(0);
    return e;
}

struct StripLayout {
    std::uint32_t rows_per_strip;
    std::size_t strips;
};

StripLayout strip_layout(std::size_t width, std::size_t height, std::size_t bytes_per_sample) {
    const std::size_t row_bytes = std::max<std::size_t>(1, width * bytes_per_sample);
    std::size_t rps = std::max<std::size_t>(1, (64 * 1024) / row_bytes);
    rps = std::min(rps, height);
    return {static_cast<std::uint32_t>(rps), (height + rps - 1) / rps};
}

/// Lays out header, one IFD, out-of-line values and pixel data.
/// `pixels` is width*height*bytes_per_sample little-endian bytes.
std::vector<std::uint8_t> assemble(std::size_t width, std::size_t height, std::uint16_t bits,
                                   std::uint16_t sample_format, std::uint16_t photometric,
                                   const std::vector<std::uint8_t>& pixels,
                                   std::vector<Entry> extra) {
    if (width == 0 || height == 0) throw std::invalid_argument("tiff: empty image");
    if (width > std::numeric_limits<std::uint32_t>::max() ||
        height > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("tiff: image too large");
    const std::size_t bps = bits / 8;
    const auto layout = strip_layout(width, height, bps);
    const std::size_t row_bytes = width * bps;

    std::vector<Entry> entries;
    entries.push_back(long_entry(kImageWidth, {static_cast<std::uint32_t>(width)}));
    entries.push_back(long_entry(kImageLength, {static_cast<std::uint32_t>(height)}));
    entries.push_back(short_entry(kBitsPerSample, {bits}));
    entries.push_back(short_entry(kCompression, {1}));
    entries.push_back(short_entry(kPhotometric, {photometric}));
    entries.push_back(long_entry(kStripOffsets, std::vector<std::uint32_t>(layout.strips, 0)));
    entries.push_back(short_entry(kSamplesPerPixel, {1}));
    entries.push_back(long_entry(kRowsPerStrip, {layout.rows_per_strip}));
    std::vector<std::uint32_t> counts;
    for (std::size_t s = 0; s < layout.strips; ++s) {
        const std::size_t rows = std::min<std::size_t>(layout.rows_per_strip,
                                                       height - s * layout.rows_per_strip);
        counts.push_back(static_cast<std::uint32_t>(rows * row_bytes));
    }
    entries.push_back(long_entry(kStripByteCounts, counts));
    entries.push_back(short_entry(kPlanarConfiguration, {1}));
    entries.push_back(short_entry(kSampleFormat, {sample_format}));
    for (auto& e : extra) entries.push_back(std::move(e));
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.tag < b.tag; });

    const std::size_t ifd_offset = 8;
    const std::size_t ifd_size = 2 + entries.size() * 12 + 4;
    std::size_t cursor = ifd_offset + ifd_size;
    std::vector<std::size_t> value_offsets(entries.size(), 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].data.size() > 4) {
            cursor += cursor & 1; // word alignment
            value_offsets[i] = cursor;
            cursor += entries[i].data.size();
        }
    }
    cursor += cursor & 1;
    const std::size_t data_offset = cursor;
    const std::size_t file_size = data_offset + pixels.size();
    if (file_size > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("tiff: image exceeds 4 GiB baseline limit");

    // Patch strip offsets now that the data position is known.
    for (auto& e : entries) {
        if (e.tag != kStripOffsets) continue;
        e.data.clear();
        for (std::size_t s = 0; s < layout.strips; ++s)
            put32(e.data, static_cast<std::uint32_t>(data_offset + s * layout.rows_per_strip * row_bytes));
    }

    std::vector<std::uint8_t> out;
    out.reserve(file_size);
    out.push_back('I');
    out.push_back('I');
    put16(out, 42);
    put32(out, static_cast<std::uint32_t>(ifd_offset));
    put16(out, static_cast<std::uint16_t>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        put16(out, e.tag);
        put16(out, e.type);
        put32(out, e.count);
        if (e.data.size() <= 4) {
            auto v = e.data;
            v.resize(4, 0);
            out.insert(out.end(), v.begin(), v.end());
        } else {
            put32(out, static_cast<std::uint32_t>(value_offsets[i]));
        }
    }
    put32(out, 0); // no further IFDs
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].data.size() <= 4) continue;
        out.resize(value_offsets[i], 0);
        out.insert(out.end(), entries[i].data.begin(), entries[i].data.end());
    }
    out.resize(data_offset, 0);
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

std::string format_nodata(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- reading

class TiffReader {
public:
    explicit TiffReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
        if (bytes.size() < 8) throw FormatError("tiff: file too short");
        if (bytes[0] == 'I' && bytes[1] == 'I') little_ = true;
        else if (bytes[0] == 'M' && bytes[1] == 'M') little_ = false;
        else throw FormatError("tiff: bad byte-order mark");
        const auto magic = u16(2);
        if (magic == 43) throw FormatError("tiff: BigTIFF is not supported");
        if (magic != 42) throw FormatError("tiff: bad magic number");
        const std::size_t ifd = u32(4);
        const std::size_t n = u16(ifd);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = ifd + 2 + i * 12;
            RawEntry e;
            e.type = u16(at + 2);
            e.count = u32(at + 4);
            const std::size_t sz = type_size(e.type);
            if (sz == 0) continue; // unknown field types are skipped per baseline rules
            const std::size_t total = sz * e.count;
            e.offset = total <= 4 ? at + 8 : u32(at + 8);
            check(e.offset, total);
            entries_[u16(at)] = e;
        }
    }

    bool has(std::uint16_t tag) const { return entries_.count(tag) != 0; }

    std::vector<std::uint64_t> uints(std::uint16_t tag) const {
        const auto it = entries_.find(tag);
        if (it == entries_.end())
            throw FormatError(std::string("tiff: missing required tag ") + tag_name(tag));
        const auto& e = it->second;
        std::vector<std::uint64_t> out;
        out.reserve(e.count);
        for (std::size_t i = 0; i < e.count; ++i) {
            switch (e.type) {
            case kByte: out.push_back(bytes_[e.offset + i]); break;
            case kShort: out.push_back(u16(e.offset + 2 * i)); break;
            case kLong: out.push_back(u32(e.offset + 4 * i)); break;
            default:
                throw FormatError(std::string("tiff: unexpected field type for tag ") +
                                  tag_name(tag));
            }
        }
        return out;
    }

    std::uint64_t uint(std::uint16_t tag, std::optional<std::uint64_t> fallback = {}) const {
        if (!has(tag) && fallback) return *fallback;
        const auto v = uints(tag);
        if (v.empty()) throw FormatError(std::string("tiff: empty tag ") + tag_name(tag));
        return v.front();
    }

    std::optional<std::string> ascii(std::uint16_t tag) const {
        const auto it = entries_.find(tag);
        if (it == entries_.end() || it->second.type != kAscii) return std::nullopt;
        const auto& e = it->second;
        std::string s(reinterpret_cast<const char*>(bytes_.data() + e.offset), e.count);
        if (const auto z = s.find('\0'); z != std::string::npos) s.resize(z);
        return s;
    }

    bool little() const noexcept { return little_; }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

    void check(std::size_t offset, std::size_t len) const {
        if (offset > bytes_.size() || len > bytes_.size() - offset)
            throw FormatError("tiff: truncated file");
    }

    std::uint16_t u16(std::size_t at) const {
        check(at, 2);
        const std::uint16_t a = bytes_[at], b = bytes_[at + 1];
        return little_ ? static_cast<std::uint16_t>(a | (b << 8))
                       : static_cast<std::uint16_t>((a << 8) | b);
    }

    std::uint32_t u32(std::size_t at) const {
        check(at, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint32_t byte = bytes_[at + (little_ ? i : 3 - i)];
            v |= byte << (8 * i);
        }
        return v;
    }

    std::uint64_t u64(std::size_t at) const {
        check(at, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            const std::uint64_t byte = bytes_[at + (little_ ? i : 7 - i)];
            v |= byte << (8 * i);
        }
        return v;
    }

private:
    struct RawEntry {
        std::uint16_t type = 0;
        std::uint32_t count = 0;
        std::size_t offset = 0;
    };

    std::span<const std::uint8_t> bytes_;
    bool little_ = true;
    std::map<std::uint16_t, RawEntry> entries_;
};

struct DecodedImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint16_t bits = 0;
    std::uint16_t sample_format = 1;
    std::uint16_t photometric = 1;
    std::vector<double> samples;
    std::optional<double> nodata;
};

DecodedImage decode_image(std::span<const std::uint8_t> bytes) {
    const TiffReader t(bytes);
    for (std::uint16_t tag : {kTileWidth, kTileLength, kTileOffsets, kTileByteCounts})
        if (t.has(tag))
            throw FormatError(std::string("tiff: unsupported tiled layout (tag ") + tag_name(tag) + ")");

    DecodedImage img;
    img.width = t.uint(kImageWidth);
    img.height = t.uint(kImageLength);
    if (img.width == 0 || img.height == 0) throw FormatError("tiff: zero-sized image");

    if (const auto c = t.uint(kCompression, 1); c != 1)
        throw FormatError("tiff: unsupported Compression " + std::to_string(c) +
                          " (only uncompressed is supported)");
    if (const auto spp = t.uint(kSamplesPerPixel, 1); spp != 1)
        throw FormatError("tiff: unsupported SamplesPerPixel " + std::to_string(spp) +
                          " (single band only)");
    img.photometric = static_cast<std::uint16_t>(t.uint(kPhotometric, 1));
    if (img.photometric > 1 && img.photometric != 3)
        throw FormatError("tiff: unsupported PhotometricInterpretation " +
                          std::to_string(img.photometric));
    img.bits = static_cast<std::uint16_t>(t.uint(kBitsPerSample, 1));
    img.sample_format = static_cast<std::uint16_t>(t.uint(kSampleFormat, 1));
    const bool ok_uint = img.sample_format == 1 && (img.bits == 8 || img.bits == 16);
    const bool ok_float = img.sample_format == 3 && (img.bits == 32 || img.bits == 64);
    if (!ok_uint && !ok_float) {
        if (img.sample_format != 1 && img.sample_format != 3)
            throw FormatError("tiff: unsupported SampleFormat " + std::to_string(img.sample_format));
        throw FormatError("tiff: unsupported BitsPerSample " + std::to_string(img.bits) +
                          " for SampleFormat " + std::to_string(img.sample_format));
    }

    const auto offsets = t.uints(kStripOffsets);
    const auto counts = t.uints(kStripByteCounts);
    if (offsets.size() != counts.size())
        throw FormatError("tiff: StripOffsets and StripByteCounts lengths differ");
    const std::size_t rps = std::min<std::uint64_t>(t.uint(kRowsPerStrip, img.height), img.height);
    if (rps == 0) throw FormatError("tiff: RowsPerStrip is 0");
    const std::size_t strips = (img.height + rps - 1) / rps;
    if (offsets.size() < strips) throw FormatError("tiff: too few strips for image height");

    const std::size_t bps = img.bits / 8;
    const std::size_t row_bytes = img.width * bps;
    img.samples.resize(img.width * img.height);
    std::size_t out = 0;
    for (std::size_t s = 0; s < strips; ++s) {
        const std::size_t rows = std::min(rps, img.height - s * rps);
        const std::size_t need = rows * row_bytes;
        if (counts[s] < need) throw FormatError("tiff: strip " + std::to_string(s) + " is short");
        t.check(offsets[s], need);
        std::size_t at = offsets[s];
        for (std::size_t i = 0; i < rows * img.width; ++i, at += bps) {
            double v = 0.0;
            switch (img.bits) {
            case 8: v = bytes[at]; break;
            case 16: v = t.u16(at); break;
            case 32: v = std::bit_cast<float>(t.u32(at)); break;
            case 64: v = std::bit_cast<double>(t.u64(at)); break;
            }
            img.samples[out++] = v;
        }
    }

    if (const auto nd = t.ascii(kGdalNodata)) {
        const auto v = detail::parse_double(*nd);
        if (!v) {
            const std::string lowered = detail::lower(detail::trim(*nd));
            if (lowered == "nan") img.nodata = std::numeric_limits<double>::quiet_NaN();
            else throw FormatError("tiff: unparsable GDAL_NODATA '" + *nd + "'");
        } else {
            img.nodata = *v;
        }
    }
    return img;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

} // namespace

std::vector<std::uint8_t> encode_tiff(const RasterGrid& grid, TiffSampleType type) {
    std::uint16_t bits = 64, format = 3;
    switch (type) {
    case TiffSampleType::UInt8: bits = 8; format = 1; break;
    case TiffSampleType::UInt16: bits = 16; format = 1; break;
    case TiffSampleType::Float32: bits = 32; format = 3; break;
    case TiffSampleType::Float64: bits = 64; format = 3; break;
    }
    const double max_int = bits == 8 ? 255.0 : 65535.0;
    std::vector<std::uint8_t> pixels;
    pixels.reserve(grid.size() * (bits / 8));
    const auto samples = grid.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i];
        if (format == 1) {
            if (!(v >= 0.0 && v <= max_int) || v != std::floor(v))
                throw std::invalid_argument("tiff: sample " + format_nodata(v) + " at pixel " +
                                            std::to_string(i) + " does not fit " +
                                            std::to_string(bits) + "-bit unsigned");
            if (bits == 8) pixels.push_back(static_cast<std::uint8_t>(v));
            else put16(pixels, static_cast<std::uint16_t>(v));
        } else if (bits == 32) {
            put32(pixels, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        } else {
            put64(pixels, std::bit_cast<std::uint64_t>(v));
        }
    }
    return assemble(grid.width(), grid.height(), bits, format, 1, pixels,
                    {ascii_entry(kGdalNodata, format_nodata(grid.nodata()))});
}

RasterGrid decode_tiff(std::span<const std::uint8_t> bytes) {
    auto img = decode_image(bytes);
    return RasterGrid(img.width, img.height, std::move(img.samples),
                      img.nodata.value_or(kDefaultNodata));
}

PaletteColor class_color(std::size_t label) {
    static constexpr PaletteColor fixed[] = {
        {0, 0, 0},       // unclassified
        {200, 0, 0},     {255, 120, 0}, {255, 220, 0}, {0, 110, 0},
        {120, 210, 90},  {0, 90, 230},  {190, 160, 110},
    };
    if (label < std::size(fixed)) return fixed[label];
    // Spread further labels over hue-like combinations.
    const auto h = static_cast<std::uint32_t>(label * 2654435761u);
    return {static_cast<std::uint8_t>(64 + (h & 0xBF)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0xBF)),
            static_cast<std::uint8_t>(64 + ((h >> 16) & 0xBF))};
}

std::vector<std::uint8_t> encode_classified_tiff(const ClassifiedGrid& grid) {
    if (grid.labels.size() != grid.width * grid.height)
        throw std::invalid_argument("tiff: label count does not match grid shape");
    Entry cmap{kColorMap, kShort, 3 * 256, {}};
    for (int channel = 0; channel < 3; ++channel) {
        for (std::size_t i = 0; i < 256; ++i) {
            const auto c = class_color(i);
            const std::uint8_t v = channel == 0 ? c.r : (channel == 1 ? c.g : c.b);
            put16(cmap.data, static_cast<std::uint16_t>(v * 257));
        }
    }
    return assemble(grid.width, grid.height, 8, 1, 3, grid.labels, {std::move(cmap)});
}

ClassifiedGrid decode_classified_tiff(std::span<const std::uint8_t> bytes) {
    const auto img = decode_image(bytes);
    if (img.bits != 8 || img.sample_format != 1)
        throw FormatError("tiff: classified image must be 8-bit unsigned");
    ClassifiedGrid out(img.width, img.height);
    std::uint8_t max_label = 0;
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        out.labels[i] = static_cast<std::uint8_t>(img.samples[i]);
        max_label = std::max(max_label, out.labels[i]);
    }
    for (int k = 1; k <= max_label; ++k) out.legend.push_back("class_" + std::to_string(k));
    return out;
}

RasterGrid read_tiff(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    try {
        return decode_tiff(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_tiff(const RasterGrid& grid, const std::filesystem::path& path, TiffSampleType type) {
    dump(path, encode_tiff(grid, type));
}

void write_tiff(const ClassifiedGrid& grid, const std::filesystem::path& path) {
    dump(path, encode_classified_tiff(grid));
}

ClassifiedGrid read_classified_tiff(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    try {
        return decode_classified_tiff(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace lstgrid::io
