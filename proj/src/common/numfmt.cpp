#include "gaius/common/numfmt.hpp"

#include <charconv>
#include <cmath>

namespace gaius {

std::string format_number(double v) {
    if (v == 0.0) return "0";
    if (std::isfinite(v) && std::trunc(v) == v && std::fabs(v) < 9.0e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace gaius
