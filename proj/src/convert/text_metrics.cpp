#include "gaius/convert/text_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gaius::convert {

std::int64_t line_height(int font_size) noexcept {
    // ceil(1.3 * font) without floating-point drift.
    return (13 * static_cast<std::int64_t>(font_size) + 9) / 10;
}

std::size_t code_points(std::string_view utf8) noexcept {
    return static_cast<std::size_t>(
        std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xc0) != 0x80; }));
}

std::size_t wrap_lines(std::string_view text, int font_size, double max_width) noexcept {
    const double advance = kAdvanceEm * static_cast<double>(std::max(font_size, 1));
    const auto per_line = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(max_width / advance)));
    std::size_t lines = 1;
    std::size_t used = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\n' || text[i] == '\t' || text[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\n' && text[i] != '\t' && text[i] != '\r') ++i;
        if (i == start) break;
        std::size_t word = code_points(text.substr(start, i - start));
        if (used > 0 && used + 1 + word <= per_line) {
            used += 1 + word;
            continue;
        }
        if (used > 0) {
            ++lines;
            used = 0;
        }
        while (word > per_line) {
            word -= per_line;
            ++lines;
        }
        used = word;
    }
    return lines;
}

std::int64_t text_height(std::string_view text, int font_size, double max_width) noexcept {
    return static_cast<std::int64_t>(wrap_lines(text, font_size, max_width)) * line_height(font_size);
}

}  // namespace gaius::convert
