#pragma once

#include <vector>

namespace gaius {

// Percentile q in [0, 100] of a sorted sample, interpolating linearly between
// the two nearest ranks. Throws Error(invalid_argument) for an empty sample.
double percentile(const std::vector<double>& sorted, double q);

// Median of an unsorted sample.
double median(std::vector<double> values);

}  // namespace gaius
