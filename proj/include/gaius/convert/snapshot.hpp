#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::convert {

enum class Trigger { parse, script, redirect, stylesheet };

std::string_view trigger_name(Trigger t) noexcept;
Trigger trigger_from_name(std::string_view name);

struct Resource {
    std::string url;
    std::string mime;
    std::uint64_t byte_size = 0;
    // Captured body. HAR captures often omit bodies of scripts and styles, in
    // which case only byte_size is known.
    std::optional<std::string> body;
    // For video resources: url of the poster image resource, if any.
    std::optional<std::string> poster;

    bool is_html() const noexcept { return mime.starts_with("text/html"); }
    bool is_image() const noexcept { return mime.starts_with("image/"); }
    bool is_video() const noexcept { return mime.starts_with("video/"); }
};

// Dependency: `child` is requested once `parent` has been received.
struct RequestEdge {
    std::size_t parent = 0;
    std::size_t child = 0;
    Trigger trigger = Trigger::parse;
};

enum class BoxKind { image, text_block, block, video, input, link };

std::string_view box_kind_name(BoxKind k) noexcept;
BoxKind box_kind_from_name(std::string_view name);

struct LayoutBox {
    BoxKind kind = BoxKind::block;
    // Resource url for image/video/link-to-image, text content for
    // text-block/link, field name for input.
    std::string source;
    double x = 0, y = 0, w = 0, h = 0;  // device pixels
    std::optional<std::string> href;
    std::optional<std::string> background;  // block fill, "#rrggbb"
    int font_size = 20;
    std::string color = "#000000";
    std::string placeholder;  // input only

    friend bool operator==(const LayoutBox&, const LayoutBox&) = default;
};

struct HtmlPageSnapshot {
    std::string url;
    std::string title;
    double viewport_width = 1080;  // device pixels spanned by layout boxes
    std::vector<Resource> resources;  // resources[0] is the root request
    std::vector<RequestEdge> edges;
    std::optional<std::vector<LayoutBox>> layout_boxes;

    std::optional<std::size_t> find(std::string_view url) const noexcept;
    std::uint64_t total_bytes() const noexcept;
};

// Checks the snapshot invariants: resource 0 is the unique source of an
// acyclic request graph and every image/video box references a resource.
// Throws Error(invalid_argument) or Error(cyclic_graph).
void check_snapshot(const HtmlPageSnapshot& snap);

// Index of the HTML document reached from the root through redirects.
std::size_t root_document(const HtmlPageSnapshot& snap);

// Directory form: manifest.json plus raw resource files.
HtmlPageSnapshot load_snapshot(const std::filesystem::path& dir);
void save_snapshot(const HtmlPageSnapshot& snap, const std::filesystem::path& dir);

// HAR 1.2 import. Resources and the request graph come from the log entries;
// parents are taken from Chrome's _initiator field or redirectURL, falling
// back to the first document. Layout boxes are not part of HAR.
HtmlPageSnapshot import_har(std::string_view har_json);

}  // namespace gaius::convert
