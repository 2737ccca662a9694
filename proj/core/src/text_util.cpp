#include "text_util.hpp"

#include <fstream>
#include <sstream>

#include "lstgrid/error.hpp"

namespace lstgrid::detail {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace lstgrid::detail
