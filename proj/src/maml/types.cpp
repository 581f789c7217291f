#include "gaius/maml/types.hpp"

#include <algorithm>
#include <cmath>

namespace gaius::maml {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string_view type_tag(const Object& obj) noexcept {
    return std::visit(overloaded{
                          [](const Image&) { return std::string_view{"img"}; },
                          [](const Text&) { return std::string_view{"txt"}; },
                          [](const Rect&) { return std::string_view{"rect"}; },
                          [](const Video&) { return std::string_view{"video"}; },
                          [](const TextField&) { return std::string_view{"text-field"}; },
                          [](const Button&) { return std::string_view{"button"}; },
                      },
                      obj);
}

const std::string* media_url(const Object& obj) noexcept {
    if (const auto* img = std::get_if<Image>(&obj)) return &img->url;
    if (const auto* vid = std::get_if<Video>(&obj)) return &vid->url;
    return nullptr;
}

std::int64_t Page::canvas_height() const noexcept {
    double bottom = 0.0;
    for (const auto& obj : objects) {
        const Box& b = box_of(obj);
        bottom = std::max(bottom, b.y + static_cast<double>(b.h));
    }
    return static_cast<std::int64_t>(std::ceil(bottom));
}

}  // namespace gaius::maml
