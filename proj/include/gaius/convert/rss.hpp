#pragma once

#include "gaius/common/geo.hpp"
#include "gaius/common/time.hpp"
#include "gaius/maml/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::convert {

struct RssItem {
    std::string title;
    std::string description;  // plain text, markup stripped
    std::optional<std::string> image_url;
    std::string link;
    std::optional<Timestamp> published_at;

    friend bool operator==(const RssItem&, const RssItem&) = default;
};

struct RssFeed {
    std::string title;
    std::string source_url;
    Timestamp fetched_at{};
    std::vector<RssItem> items;  // newest first
};

// RSS 2.0 or Atom 1.0. Items without a usable link are dropped. Throws
// Error(parse_failure) with the line of the problem for malformed XML.
RssFeed parse_feed(std::string_view xml, std::string_view source_url = {}, Timestamp fetched_at = {});

struct RssLayoutParams {
    std::string page_id = "rss";
    std::string title;  // feed title when empty
    std::string author_id = "rss-translator";
    std::string language = "en";
    std::optional<GeoPoint> location;
    std::optional<std::string> community_id;
    std::int64_t canvas_width = 1080;
    int margin = 24;
    int image_height = 576;
    int title_font = 36;
    int description_font = 24;
    int caption_gap = 12;  // between the parts of one item
    int item_gap = 48;     // between items
    std::size_t max_description_chars = 280;
    std::string placeholder_image = "/static/rss-placeholder.png";
    std::string font_type = "Arial";
    std::string title_color = "#111111";
    std::string description_color = "#444444";
};

// Three objects per item, in order: Image (item image or placeholder),
// Text (title), Text (description). Image and title link to the item.
maml::Page translate_rss(const RssFeed& feed, const RssLayoutParams& layout = {});

}  // namespace gaius::convert
