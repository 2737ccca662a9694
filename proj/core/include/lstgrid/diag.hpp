#pragma once

#include <functional>
#include <string_view>

namespace lstgrid {

using WarningSink = std::function<void(std::string_view)>;

// Non-fatal conditions (clamped path radiance, out-of-range reflectance, ...)
// are reported here. Default sink writes to stderr.
void warn(std::string_view message);

// Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

} // namespace lstgrid
