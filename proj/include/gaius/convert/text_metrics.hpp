#pragma once

#include <cstdint>
#include <string_view>

namespace gaius::convert {

// Fixed-advance text measurement used by every layout in this module:
// each code point advances 0.55 em and lines are 1.3 em apart.
inline constexpr double kAdvanceEm = 0.55;
inline constexpr double kLineHeightEm = 1.3;

std::int64_t line_height(int font_size) noexcept;

std::size_t code_points(std::string_view utf8) noexcept;

// Greedy word wrap; words longer than a line are split. Returns >= 1.
std::size_t wrap_lines(std::string_view text, int font_size, double max_width) noexcept;

// Height of the wrapped block: lines * line_height.
std::int64_t text_height(std::string_view text, int font_size, double max_width) noexcept;

}  // namespace gaius::convert
