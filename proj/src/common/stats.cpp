#include "gaius/common/stats.hpp"

#include "gaius/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace gaius {

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(Errc::invalid_argument, "percentile of an empty sample");
    if (!(q >= 0 && q <= 100)) throw Error(Errc::invalid_argument, "percentile out of range");
    const double rank = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return percentile(values, 50);
}

}  // namespace gaius
