#pragma once

#include <string>

namespace gaius {

// Shortest decimal text that parses back to the same double; integral values
// print without a fractional part.
std::string format_number(double v);

}  // namespace gaius
