#include "lstgrid/io/lst_text.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "lstgrid/error.hpp"
#include "../text_util.hpp"

namespace lstgrid::io {

void write_lst_text(const RasterGrid& grid, std::ostream& out) {
    std::string line;
    char buf[48];
    for (std::size_t r = 0; r < grid.height(); ++r) {
        line.clear();
        for (double v : grid.row(r)) {
            if (!line.empty()) line.push_back(' ');
            if (grid.is_nodata(v) || !std::isfinite(v)) {
                line += "NA";
            } else {
                std::snprintf(buf, sizeof buf, "%.2f", v);
                line += buf;
            }
        }
        line.push_back('\n');
        out << line;
    }
}

void write_lst_text(const RasterGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    write_lst_text(grid, out);
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

RasterGrid parse_lst_text(std::string_view text, std::string_view source) {
    const std::string src(source);
    std::vector<double> samples;
    std::size_t width = 0;
    std::size_t height = 0;
    detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto words = detail::split_ws(line);
        if (words.empty()) return;
        if (height == 0) width = words.size();
        else if (words.size() != width)
            throw FormatError(src + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(width) + " values, got " + std::to_string(words.size()));
        for (auto w : words) {
            if (w == "NA") {
                samples.push_back(kDefaultNodata);
                continue;
            }
            const auto v = detail::parse_double(w);
            if (!v)
                throw FormatError(src + ":" + std::to_string(line_no) + ": non-numeric token '" +
                                  std::string(w) + "'");
            samples.push_back(*v);
        }
        ++height;
    });
    if (height == 0) throw FormatError(src + ": no data");
    return RasterGrid(width, height, std::move(samples), kDefaultNodata);
}

RasterGrid read_lst_text(const std::filesystem::path& path) {
    return parse_lst_text(detail::read_file(path.string()), path.string());
}

} // namespace lstgrid::io
