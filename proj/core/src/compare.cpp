#include "lstgrid/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "text_util.hpp"

namespace lstgrid {

namespace {

std::string num(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string row(std::string_view label, std::string_view value) {
    std::string s(label);
    if (s.size() < 28) s.resize(28, ' ');
    return s + std::string(value) + '\n';
}

} // namespace

double parse_clock(std::string_view text) {
    const auto t = detail::trim(text);
    const auto sep = t.find_first_of(":.");
    auto bad = [&] { return std::invalid_argument("bad clock time '" + std::string(text) + "'"); };
    const auto h = detail::parse_int<int>(t.substr(0, sep));
    if (!h || *h < 0 || *h > 24) throw bad();
    int m = 0;
    if (sep != std::string_view::npos) {
        const auto mm = t.substr(sep + 1);
        const auto v = detail::parse_int<int>(mm);
        if (mm.size() != 2 || !v || *v < 0 || *v > 59) throw bad();
        m = *v;
    }
    if (*h == 24 && m != 0) throw bad();
    return *h + m / 60.0;
}

std::string format_clock(double hour) {
    const long minutes = std::lround(hour * 60.0);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld", minutes / 60, minutes % 60);
    return buf;
}

double interpolate_station(std::vector<StationReading> readings, double hour) {
    if (readings.size() < 2) throw std::invalid_argument("need at least two station readings");
    std::sort(readings.begin(), readings.end(),
              [](const auto& a, const auto& b) { return a.hour < b.hour; });
    for (std::size_t i = 0; i + 1 < readings.size(); ++i) {
        const auto& a = readings[i];
        const auto& b = readings[i + 1];
        if (hour < a.hour || hour > b.hour) continue;
        if (b.hour == a.hour) return a.celsius;
        return a.celsius + (hour - a.hour) / (b.hour - a.hour) * (b.celsius - a.celsius);
    }
    throw std::invalid_argument("overpass " + format_clock(hour) + " outside the station readings " +
                                format_clock(readings.front().hour) + ".." +
                                format_clock(readings.back().hour));
}

std::string format_comparison(const Comparison& c) {
    std::string s;
    if (!c.date.empty()) s += row("Date:", c.date);
    s += row("Overpass (local time)", format_clock(c.overpass_hour));
    if (c.water_vapour_g_cm2) s += row("w (g/cm2)", num(*c.water_vapour_g_cm2, 2));
    s += "Weather station mean LST (C)\n";
    auto sorted = c.readings;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.hour < b.hour; });
    for (const auto& r : sorted) s += row("  At " + format_clock(r.hour) + ":", num(r.celsius, 2));
    const double linear = interpolate_station(c.readings, c.overpass_hour);
    s += row("  At " + format_clock(c.overpass_hour) + " (linear):", num(linear, 2));
    if (c.reference) s += row("  At " + format_clock(c.overpass_hour) + " (reference):", *c.reference);
    s += "Remote sensed LST\n";
    s += row("  Mean LST (C)", num(c.estimated_mean_c, 2));
    s += row("  Difference vs linear", num(c.estimated_mean_c - linear, 2));
    if (c.reference) {
        const auto ref = detail::parse_double(*c.reference);
        if (ref) {
            s += row("  Difference vs reference", num(c.estimated_mean_c - *ref, 2));
            if (std::abs(*ref - linear) > 0.005)
                s += "note: reference differs from the linear interpolation by " +
                     num(*ref - linear, 2) + " C\n";
        }
    }
    return s;
}

} // namespace lstgrid
