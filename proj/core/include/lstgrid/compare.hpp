#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lstgrid {

/// Ground-station mean surface temperature at a local clock time.
struct StationReading {
    double hour = 0.0; // decimal hours
    double celsius = 0.0;
};

/// Parses `HH:MM`, `HH.MM` (minutes after the dot) or `HH`. Throws
/// std::invalid_argument.
double parse_clock(std::string_view text);
std::string format_clock(double hour);

/// Linear interpolation between the two readings bracketing `hour`.
/// Throws std::invalid_argument with fewer than two readings or when `hour`
/// is outside their range.
double interpolate_station(std::vector<StationReading> readings, double hour);

struct Comparison {
    std::string date;
    double overpass_hour = 0.0;
    std::vector<StationReading> readings;
    std::optional<double> water_vapour_g_cm2;
    /// Externally quoted station value at overpass, echoed as given.
    std::optional<std::string> reference;
    double estimated_mean_c = 0.0;
};

/// Two-column measured vs remote-sensed report.
std::string format_comparison(const Comparison& c);

} // namespace lstgrid
