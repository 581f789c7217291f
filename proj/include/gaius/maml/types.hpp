#pragma once

#include "gaius/common/geo.hpp"
#include "gaius/common/time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gaius::maml {

inline constexpr std::int64_t kDefaultCanvasWidth = 1080;

// Reference-pixel rectangle, origin top-left, y grows downward.
struct Box {
    double x = 0.0;
    double y = 0.0;
    std::int64_t w = 0;
    std::int64_t h = 0;

    bool contains(double px, double py) const noexcept {
        return px >= x && py >= y && px < x + static_cast<double>(w) && py < y + static_cast<double>(h);
    }

    friend bool operator==(const Box&, const Box&) = default;
};

struct Image {
    std::string url;
    Box box;
    std::optional<std::string> href;

    friend bool operator==(const Image&, const Image&) = default;
};

struct Text {
    std::string txt;
    Box box;
    std::int64_t font = 20;
    std::string font_type = "Arial";
    std::string color = "#000000";
    std::optional<std::string> href;

    friend bool operator==(const Text&, const Text&) = default;
};

struct Rect {
    Box box;
    std::string color = "#ffffff";

    friend bool operator==(const Rect&, const Rect&) = default;
};

// href is optional so that video ads can carry their click target.
struct Video {
    std::string url;
    Box box;
    std::optional<std::string> href;

    friend bool operator==(const Video&, const Video&) = default;
};

struct TextField {
    std::string name;
    std::string placeholder;
    Box box;

    friend bool operator==(const TextField&, const TextField&) = default;
};

struct Button {
    std::string label;
    std::string action;
    Box box;
    std::string color = "#cccccc";

    friend bool operator==(const Button&, const Button&) = default;
};

using Object = std::variant<Image, Text, Rect, Video, TextField, Button>;

// Wire tag for each variant: img, txt, rect, video, text-field, button.
std::string_view type_tag(const Object& obj) noexcept;

inline const Box& box_of(const Object& obj) noexcept {
    return std::visit([](const auto& o) -> const Box& { return o.box; }, obj);
}
inline Box& box_of(Object& obj) noexcept {
    return std::visit([](auto& o) -> Box& { return o.box; }, obj);
}

// Media url for Image/Video, nullptr otherwise.
const std::string* media_url(const Object& obj) noexcept;

struct Page {
    std::string page_id;
    std::string title;
    std::string language;                 // BCP-47; empty means "not yet filled"
    std::optional<GeoPoint> location;     // empty means "not yet filled"
    std::string author_id;
    std::optional<std::string> community_id;
    std::int64_t canvas_width = kDefaultCanvasWidth;
    std::vector<Object> objects;          // paint order, later is on top
    std::int64_t version = 0;
    Timestamp created_at{};
    Timestamp updated_at{};

    // Derived from the objects, so it is current after any mutation.
    std::int64_t canvas_height() const noexcept;

    friend bool operator==(const Page&, const Page&) = default;
};

}  // namespace gaius::maml
