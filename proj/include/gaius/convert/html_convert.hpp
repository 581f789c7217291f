#pragma once

#include "gaius/convert/snapshot.hpp"
#include "gaius/maml/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gaius::convert {

struct ConvertOptions {
    bool allow_fallback_layout = true;
    std::string page_id;  // derived from the url when empty
    std::string author_id = "converter";
    std::string language;  // taken from <html lang> when empty, else "en"
    std::optional<GeoPoint> location;
    std::optional<std::string> community_id;
    std::string font_type = "Arial";
};

struct ConversionResult {
    maml::Page page;
    std::vector<std::string> notes;
    bool used_fallback_layout = false;
};

// Flattens a captured page into MAML. Throws Error(empty_snapshot) when there
// is nothing to lay out and Error(unscalable_viewport) for a width <= 0.
ConversionResult convert_html(const HtmlPageSnapshot& snap, const ConvertOptions& opts = {});

}  // namespace gaius::convert
