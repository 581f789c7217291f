#include "gaius/maml/validate.hpp"

#include <cctype>
#include <cmath>

namespace gaius::maml {

bool is_normalized_color(std::string_view color) noexcept {
    if (color.size() != 7 || color[0] != '#') return false;
    for (char c : color.substr(1)) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

std::string normalize_color(std::string_view color) {
    std::string out(color);
    if (out.size() != 7 || out[0] != '#') return out;
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!std::isxdigit(static_cast<unsigned char>(out[i]))) return std::string(color);
        out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
    }
    return out;
}

bool is_language_tag(std::string_view tag) noexcept {
    // language subtag (2-3 or 5-8 letters) followed by 1-8 char alnum subtags.
    std::size_t start = 0;
    bool first = true;
    while (start <= tag.size()) {
        std::size_t end = tag.find('-', start);
        if (end == std::string_view::npos) end = tag.size();
        const auto part = tag.substr(start, end - start);
        if (part.empty() || part.size() > 8) return false;
        for (char c : part) {
            const auto uc = static_cast<unsigned char>(c);
            if (first ? !std::isalpha(uc) : !std::isalnum(uc)) return false;
        }
        if (first && part.size() == 4) return false;
        first = false;
        if (end == tag.size()) return true;
        start = end + 1;
    }
    return false;
}

namespace {

bool is_valid_utf8(std::string_view s) noexcept {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c >> 5) == 0x6) {
            len = 2;
            cp = c & 0x1f;
        } else if ((c >> 4) == 0xe) {
            len = 3;
            cp = c & 0x0f;
        } else if ((c >> 3) == 0x1e) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc >> 6) != 0x2) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10ffff)) ||
            (cp >= 0xd800 && cp <= 0xdfff)) {
            return false;
        }
        i += len;
    }
    return true;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

std::string_view trim_left(std::string_view s) noexcept {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    return s;
}

// A hyperlink navigates; it must not be something that executes or embeds.
bool is_navigation_only(std::string_view link) noexcept {
    link = trim_left(link);
    return !starts_with_ci(link, "javascript:") && !starts_with_ci(link, "data:") &&
           !starts_with_ci(link, "vbscript:");
}

// A media url may be a data: image, but never a document that would fetch more.
bool is_flat_media(std::string_view url) noexcept {
    url = trim_left(url);
    if (starts_with_ci(url, "javascript:") || starts_with_ci(url, "vbscript:")) return false;
    if (starts_with_ci(url, "data:")) {
        return starts_with_ci(url, "data:image/") || starts_with_ci(url, "data:video/");
    }
    return true;
}

class Checker {
public:
    explicit Checker(std::vector<Violation>& out) : out_(out) {}

    void flag(long index, std::string_view field, std::string_view rule) {
        out_.push_back(Violation{index, std::string(field), std::string(rule)});
    }

    void box(long i, const Box& b) {
        if (!std::isfinite(b.x)) flag(i, "x", rule::kFinitePosition);
        if (!std::isfinite(b.y)) flag(i, "y", rule::kFinitePosition);
        if (b.x < 0) flag(i, "x", rule::kNonNegativePosition);
        if (b.y < 0) flag(i, "y", rule::kNonNegativePosition);
        if (b.w <= 0) flag(i, "w", rule::kPositiveExtent);
        if (b.h <= 0) flag(i, "h", rule::kPositiveExtent);
        if (b.x > kMaxCoordinate) flag(i, "x", rule::kExtentLimit);
        if (b.y > kMaxCoordinate) flag(i, "y", rule::kExtentLimit);
        if (static_cast<double>(b.w) > kMaxCoordinate) flag(i, "w", rule::kExtentLimit);
        if (static_cast<double>(b.h) > kMaxCoordinate) flag(i, "h", rule::kExtentLimit);
    }

    void color(long i, std::string_view field, const std::string& c) {
        if (!is_normalized_color(c)) flag(i, field, rule::kColorFormat);
    }

    void media(long i, const std::string& url) {
        text(i, "url", url);
        if (url.empty()) {
            flag(i, "url", rule::kNonEmptyUrl);
        } else if (!is_flat_media(url)) {
            flag(i, "url", rule::kFlatReference);
        }
    }

    void link(long i, std::string_view field, const std::optional<std::string>& href) {
        if (!href) return;
        link(i, field, *href);
    }

    void link(long i, std::string_view field, const std::string& href) {
        text(i, field, href);
        if (href.empty()) {
            flag(i, field, rule::kNonEmptyHref);
        } else if (!is_navigation_only(href)) {
            flag(i, field, rule::kFlatReference);
        }
    }

    void text(long i, std::string_view field, const std::string& s) {
        if (!is_valid_utf8(s)) flag(i, field, rule::kUtf8);
    }

    void operator()(long i, const Image& o) {
        media(i, o.url);
        box(i, o.box);
        link(i, "href", o.href);
    }
    void operator()(long i, const Text& o) {
        text(i, "txt", o.txt);
        box(i, o.box);
        if (o.font <= 0) flag(i, "font", rule::kPositiveFont);
        text(i, "font-type", o.font_type);
        color(i, "color", o.color);
        link(i, "href", o.href);
    }
    void operator()(long i, const Rect& o) {
        box(i, o.box);
        color(i, "color", o.color);
    }
    void operator()(long i, const Video& o) {
        media(i, o.url);
        box(i, o.box);
        link(i, "href", o.href);
    }
    void operator()(long i, const TextField& o) {
        text(i, "name", o.name);
        text(i, "placeholder", o.placeholder);
        if (o.name.empty()) flag(i, "name", rule::kNonEmptyName);
        box(i, o.box);
    }
    void operator()(long i, const Button& o) {
        text(i, "label", o.label);
        link(i, "action", o.action);
        box(i, o.box);
        color(i, "color", o.color);
    }

private:
    std::vector<Violation>& out_;
};

}  // namespace

std::vector<Violation> validate(const Page& page) {
    std::vector<Violation> out;
    Checker check(out);
    if (page.canvas_width <= 0) check.flag(-1, "canvas_width", rule::kCanvasWidth);
    if (!page.language.empty() && !is_language_tag(page.language)) check.flag(-1, "language", rule::kLanguageTag);
    if (page.location) {
        if (!(page.location->lat >= -90.0 && page.location->lat <= 90.0)) {
            check.flag(-1, "location.lat", rule::kLatitudeRange);
        }
        if (!(page.location->lon >= -180.0 && page.location->lon <= 180.0)) {
            check.flag(-1, "location.lon", rule::kLongitudeRange);
        }
    }
    check.text(-1, "title", page.title);
    check.text(-1, "id", page.page_id);
    check.text(-1, "author", page.author_id);
    if (page.community_id) check.text(-1, "community", *page.community_id);
    for (std::size_t i = 0; i < page.objects.size(); ++i) {
        const long idx = static_cast<long>(i);
        std::visit([&](const auto& o) { check(idx, o); }, page.objects[i]);
    }
    return out;
}

}  // namespace gaius::maml
