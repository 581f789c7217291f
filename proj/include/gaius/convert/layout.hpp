#pragma once

#include "gaius/convert/snapshot.hpp"

#include <string>
#include <vector>

namespace gaius::convert {

struct LayoutResult {
    std::vector<LayoutBox> boxes;  // canvas pixels, document order
    std::vector<std::string> notes;
};

inline constexpr double kFallbackCanvasWidth = 1080;

// Single-column block flow over the root HTML document: blocks stack at full
// canvas width, images keep their aspect ratio and shrink to fit the width,
// text wraps with the fixed metrics from text_metrics.hpp. Scripts and styles
// produce nothing; iframes are dropped with a note.
// Throws Error(parse_failure) when the root document has no HTML body.
LayoutResult fallback_layout(const HtmlPageSnapshot& snap);

}  // namespace gaius::convert
