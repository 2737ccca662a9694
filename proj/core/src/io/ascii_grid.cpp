#include "lstgrid/io/ascii_grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "lstgrid/error.hpp"
#include "../text_util.hpp"

namespace lstgrid::io {

namespace {

bool looks_numeric(std::string_view tok) {
    if (tok.empty()) return false;
    const char c = tok.front();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

} // namespace

RasterGrid parse_ascii_grid(std::string_view text, std::string_view source,
                            AsciiGridGeometry* geometry) {
    const std::string src(source);
    auto fail = [&](std::size_t line, const std::string& msg) {
        throw FormatError(src + ":" + std::to_string(line) + ": " + msg);
    };

    std::optional<long long> ncols, nrows;
    std::optional<double> xll, yll, cellsize;
    double nodata = kDefaultNodata;

    std::size_t pos = 0;
    std::size_t line_no = 0;
    // Header: `key value` lines until the first line starting with a number.
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        const std::string_view line = detail::trim(text.substr(pos, end - pos));
        const auto words = detail::split_ws(line);
        if (!words.empty() && looks_numeric(words[0])) break;
        ++line_no;
        pos = end + 1;
        if (words.empty()) continue;
        if (words.size() != 2) fail(line_no, "malformed header line '" + std::string(line) + "'");
        const std::string key = detail::lower(words[0]);
        const auto value = detail::parse_double(words[1]);
        if (!value) fail(line_no, "non-numeric header value '" + std::string(words[1]) + "'");
        auto as_count = [&]() {
            if (*value < 1 || *value != std::floor(*value))
                fail(line_no, key + " must be a positive integer");
            return static_cast<long long>(*value);
        };
        if (key == "ncols") ncols = as_count();
        else if (key == "nrows") nrows = as_count();
        else if (key == "xllcorner" || key == "xllcenter") xll = *value;
        else if (key == "yllcorner" || key == "yllcenter") yll = *value;
        else if (key == "cellsize") cellsize = *value;
        else if (key == "nodata_value") nodata = *value;
        else fail(line_no, "unknown header key '" + std::string(words[0]) + "'");
    }
    if (pos > text.size()) pos = text.size();

    const std::size_t header_end = line_no + 1;
    if (!ncols) fail(header_end, "missing ncols in header");
    if (!nrows) fail(header_end, "missing nrows in header");
    if (!xll) fail(header_end, "missing xllcorner in header");
    if (!yll) fail(header_end, "missing yllcorner in header");
    if (!cellsize) fail(header_end, "missing cellsize in header");

    const std::size_t width = static_cast<std::size_t>(*ncols);
    const std::size_t height = static_cast<std::size_t>(*nrows);
    std::vector<double> samples;
    samples.reserve(width * height);

    const char* p = text.data() + pos;
    const char* const last = text.data() + text.size();
    std::size_t cur_line = line_no + 1;
    while (true) {
        while (p < last && std::isspace(static_cast<unsigned char>(*p))) {
            if (*p == '\n') ++cur_line;
            ++p;
        }
        if (p >= last) break;
        const char* tok_end = p;
        while (tok_end < last && !std::isspace(static_cast<unsigned char>(*tok_end))) ++tok_end;
        if (samples.size() == width * height) fail(cur_line, "more than ncols*nrows samples");
        const char* q = (*p == '+') ? p + 1 : p;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(q, tok_end, v);
        if (ec != std::errc{} || ptr != tok_end)
            fail(cur_line, "non-numeric token '" + std::string(p, tok_end) + "'");
        samples.push_back(v);
        p = tok_end;
    }
    if (samples.size() != width * height)
        fail(cur_line, "short data: expected " + std::to_string(width * height) + " samples, got " +
                           std::to_string(samples.size()));

    if (geometry) *geometry = {*xll, *yll, *cellsize};
    return RasterGrid(width, height, std::move(samples), nodata);
}

RasterGrid read_ascii_grid(const std::filesystem::path& path, AsciiGridGeometry* geometry) {
    return parse_ascii_grid(detail::read_file(path.string()), path.string(), geometry);
}

void write_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path,
                      const AsciiGridGeometry& geometry) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    char buf[64];
    auto fmt = [&](double v) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        return std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    };
    out << "ncols " << grid.width() << '\n' << "nrows " << grid.height() << '\n';
    out << "xllcorner " << fmt(geometry.xllcorner) << '\n';
    out << "yllcorner " << fmt(geometry.yllcorner) << '\n';
    out << "cellsize " << fmt(geometry.cellsize) << '\n';
    out << "NODATA_value " << fmt(grid.nodata()) << '\n';
    std::string line;
    for (std::size_t r = 0; r < grid.height(); ++r) {
        line.clear();
        for (double v : grid.row(r)) {
            if (!line.empty()) line.push_back(' ');
            line += fmt(v);
        }
        line.push_back('\n');
        out << line;
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

} // namespace lstgrid::io
