#include "gaius/maml/geometry.hpp"

#include "gaius/common/error.hpp"
#include "gaius/maml/codec.hpp"

namespace gaius::maml {

std::optional<std::size_t> hit_test(const Page& page, double x, double y) {
    for (std::size_t i = page.objects.size(); i-- > 0;) {
        if (box_of(page.objects[i]).contains(x, y)) return i;
    }
    return std::nullopt;
}

std::uint64_t page_weight(const Page& page, const MediaSizes& media_sizes) {
    std::uint64_t total = serialize_page(page).size();
    for (const auto& obj : page.objects) {
        const std::string* url = media_url(obj);
        if (url == nullptr) continue;
        auto it = media_sizes.find(*url);
        if (it == media_sizes.end()) throw Error(Errc::missing_media_size, "no size for media url " + *url);
        total += it->second;
    }
    return total;
}

std::size_t request_count(const Page& page) noexcept {
    std::size_t n = 1;
    for (const auto& obj : page.objects) {
        if (media_url(obj) != nullptr) ++n;
    }
    return n;
}

}  // namespace gaius::maml
