#include "gaius/convert/html_convert.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/convert/html.hpp"
#include "gaius/convert/layout.hpp"
#include "gaius/maml/validate.hpp"

#include <algorithm>
#include <cmath>

namespace gaius::convert {

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::int64_t extent(double v) { return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(v + 0.5))); }

// <title> and <html lang> from the root document, when captured.
void read_document_meta(const HtmlPageSnapshot& snap, std::string& title, std::string& lang) {
    const auto doc = root_document(snap);
    if (!snap.resources[doc].is_html() || !snap.resources[doc].body) return;
    const auto tokens = html::tokenize(*snap.resources[doc].body);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind != html::Token::Kind::start_tag) continue;
        if (t.name == "html") {
            if (const auto* l = t.attr("lang")) lang = *l;
        } else if (t.name == "title" && i + 1 < tokens.size() && tokens[i + 1].kind == html::Token::Kind::text) {
            title = tokens[i + 1].text;
            break;
        }
    }
}

std::string collapse(std::string_view s) {
    std::string out;
    for (char c : s) {
        const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
        if (space) {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace

ConversionResult convert_html(const HtmlPageSnapshot& snap, const ConvertOptions& opts) {
    if (snap.resources.empty()) throw Error(Errc::empty_snapshot, "snapshot has no resources");
    ConversionResult result;

    std::vector<LayoutBox> boxes;
    double viewport = snap.viewport_width;
    if (snap.layout_boxes && !snap.layout_boxes->empty()) {
        boxes = *snap.layout_boxes;
    } else if (opts.allow_fallback_layout) {
        auto layout = fallback_layout(snap);
        boxes = std::move(layout.boxes);
        result.notes = std::move(layout.notes);
        result.used_fallback_layout = true;
        viewport = kFallbackCanvasWidth;
    } else {
        throw Error(Errc::empty_snapshot, "snapshot " + snap.url + " has no layout boxes and fallback layout is disabled");
    }
    if (!(viewport > 0)) throw Error(Errc::unscalable_viewport, "viewport width must be positive");

    maml::Page& page = result.page;
    const double scale = static_cast<double>(page.canvas_width) / viewport;

    std::string doc_title = snap.title;
    std::string doc_lang;
    read_document_meta(snap, doc_title, doc_lang);
    page.page_id = opts.page_id.empty() ? "html-" + content_id(snap.url).substr(0, 16) : opts.page_id;
    page.title = html::sanitize_utf8(collapse(doc_title));
    page.language = !opts.language.empty() ? opts.language : (maml::is_language_tag(doc_lang) ? doc_lang : "en");
    page.location = opts.location;
    page.author_id = opts.author_id;
    page.community_id = opts.community_id;

    for (const auto& b : boxes) {
        maml::Box box;
        box.x = round2(std::max(0.0, b.x * scale));
        box.y = round2(std::max(0.0, b.y * scale));
        box.w = extent(b.w * scale);
        box.h = extent(b.h * scale);
        if (b.w <= 0 || b.h <= 0) {
            result.notes.push_back(std::string("skipped empty ") + std::string(box_kind_name(b.kind)) + " box");
            continue;
        }
        std::optional<std::string> href;
        if (b.href && !b.href->empty()) href = b.href;

        auto make_text = [&](const std::string& txt) {
            maml::Text t;
            t.txt = html::sanitize_utf8(txt);
            t.box = box;
            t.font = extent(static_cast<double>(b.font_size) * scale);
            t.font_type = opts.font_type;
            t.color = maml::normalize_color(b.color);
            if (!maml::is_normalized_color(t.color)) t.color = "#000000";
            t.href = href;
            return t;
        };

        switch (b.kind) {
            case BoxKind::image:
                page.objects.push_back(maml::Image{b.source, box, href});
                break;
            case BoxKind::video:
                page.objects.push_back(maml::Video{b.source, box, std::nullopt});
                break;
            case BoxKind::text_block:
                page.objects.push_back(make_text(b.source));
                break;
            case BoxKind::block: {
                if (!b.background) break;
                const auto color = maml::normalize_color(*b.background);
                if (!maml::is_normalized_color(color)) {
                    result.notes.push_back("ignored block background " + *b.background);
                    break;
                }
                maml::Rect r;
                r.box = box;
                r.color = color;
                page.objects.push_back(r);
                break;
            }
            case BoxKind::input:
                page.objects.push_back(maml::TextField{
                    b.source.empty() ? "field" + std::to_string(page.objects.size()) : b.source, b.placeholder, box});
                break;
            case BoxKind::link: {
                if (!href) href = b.source;
                const auto idx = snap.find(b.source);
                if (idx && snap.resources[*idx].is_image()) {
                    page.objects.push_back(maml::Image{b.source, box, href});
                } else {
                    page.objects.push_back(make_text(b.source));
                }
                break;
            }
        }
    }

    if (const auto violations = maml::validate(page); !violations.empty()) {
        const auto& v = violations.front();
        throw Error(Errc::invariant_violation, "conversion produced an invalid object " +
                                                   std::to_string(v.object_index) + ": " + v.field + " " + v.rule);
    }
    return result;
}

}  // namespace gaius::convert
