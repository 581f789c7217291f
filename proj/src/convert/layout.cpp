#include "gaius/convert/layout.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/image_probe.hpp"
#include "gaius/convert/html.hpp"
#include "gaius/convert/text_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace gaius::convert {

namespace {

constexpr std::array<std::string_view, 32> kBlockTags{
    "body",   "div",    "p",       "h1",      "h2",  "h3",  "h4",   "h5",     "h6",   "li",        "ul",
    "ol",     "section", "article", "header", "footer", "nav", "main", "aside", "blockquote", "pre", "figure",
    "figcaption", "table", "tr",   "td",      "th",  "form", "dl",   "dt",     "dd",   "address",
};

bool is_block(std::string_view tag) { return std::find(kBlockTags.begin(), kBlockTags.end(), tag) != kBlockTags.end(); }

int font_for(std::string_view tag) {
    if (tag == "h1") return 40;
    if (tag == "h2") return 32;
    if (tag == "h3") return 28;
    if (tag == "h4") return 24;
    if (tag == "h6") return 18;
    return 20;
}

std::optional<double> px_attr(const html::Token& t, std::string_view key) {
    const std::string* v = t.attr(key);
    if (v == nullptr || v->empty()) return std::nullopt;
    char* end = nullptr;
    const double d = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || d <= 0 || !std::isfinite(d)) return std::nullopt;
    return d;
}

struct OpenElement {
    std::string tag;
    bool block = false;
    std::optional<std::string> href;        // for <a>
    std::optional<std::string> background;  // explicit block fill
    std::string color;                      // explicit text color
    std::size_t insert_at = 0;
    double start_y = 0;
};

class FlowLayout {
public:
    FlowLayout(const HtmlPageSnapshot& snap, std::size_t doc) : snap_(snap), base_(snap.resources[doc].url) {}

    LayoutResult run(const std::vector<html::Token>& tokens) {
        using Kind = html::Token::Kind;
        bool skip_text = false;
        bool in_head = false;
        for (const auto& t : tokens) {
            if (t.kind == Kind::text) {
                if (!skip_text && !in_head) append_text(t.text);
                skip_text = false;
                continue;
            }
            skip_text = false;
            if (t.kind == Kind::start_tag) {
                if (t.name == "head") in_head = true;
                if (t.name == "body") in_head = false;
                start(t, skip_text);
            } else if (t.kind == Kind::end_tag) {
                if (t.name == "head") in_head = false;
                end(t.name);
            }
        }
        flush_text();
        while (!stack_.empty()) pop();
        return std::move(out_);
    }

private:
    void start(const html::Token& t, bool& skip_text) {
        const auto& name = t.name;
        if (name == "script" || name == "style" || name == "noscript" || name == "textarea" || name == "title" ||
            name == "template") {
            skip_text = true;
            return;
        }
        if (name == "br") {
            text_ += ' ';
            return;
        }
        if (name == "img") return image(t);
        if (name == "video") return video_start(t);
        if (name == "source") {
            if (pending_video_) {
                if (const auto* src = t.attr("src")) emit_video(html::resolve_url(base_, *src));
            }
            return;
        }
        if (name == "input") return input(t);
        if (name == "iframe") {
            const std::string* src = t.attr("src");
            out_.notes.push_back("dropped iframe " + (src ? *src : std::string("(no src)")));
            return;
        }
        if (name == "a") {
            OpenElement e;
            e.tag = name;
            if (const auto* href = t.attr("href"); href && !href->empty()) e.href = html::resolve_url(base_, *href);
            stack_.push_back(std::move(e));
            return;
        }
        if (!is_block(name)) return;

        flush_text();
        OpenElement e;
        e.tag = name;
        e.block = true;
        const std::string* style = t.attr("style");
        std::string bg;
        if (style) {
            bg = html::parse_css_color(html::style_property(*style, "background-color"));
            if (bg.empty()) bg = html::parse_css_color(html::style_property(*style, "background"));
            e.color = html::parse_css_color(html::style_property(*style, "color"));
        }
        if (bg.empty()) {
            if (const auto* attr = t.attr("bgcolor")) bg = html::parse_css_color(*attr);
        }
        if (!bg.empty()) e.background = bg;
        e.insert_at = out_.boxes.size();
        e.start_y = y_;
        stack_.push_back(std::move(e));
    }

    void end(const std::string& name) {
        if (name == "video") {
            pending_video_ = false;
            return;
        }
        if (name == "a") {
            for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
                if (it->tag == "a") {
                    stack_.erase(std::next(it).base());
                    break;
                }
            }
            return;
        }
        if (!is_block(name)) return;
        const auto match = std::find_if(stack_.rbegin(), stack_.rend(), [&](const auto& e) { return e.tag == name; });
        if (match == stack_.rend()) return;
        flush_text();
        const auto keep = static_cast<std::size_t>(std::distance(match, stack_.rend())) - 1;
        while (stack_.size() > keep) pop();
    }

    void pop() {
        OpenElement e = std::move(stack_.back());
        stack_.pop_back();
        if (e.block) flush_text();
        if (e.background && y_ > e.start_y) {
            LayoutBox fill;
            fill.kind = BoxKind::block;
            fill.x = 0;
            fill.y = e.start_y;
            fill.w = kFallbackCanvasWidth;
            fill.h = y_ - e.start_y;
            fill.background = e.background;
            out_.boxes.insert(out_.boxes.begin() + static_cast<std::ptrdiff_t>(e.insert_at), fill);
        }
    }

    std::optional<std::string> current_href() const {
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
            if (it->tag == "a") return it->href;
        }
        return std::nullopt;
    }

    const OpenElement* innermost_block() const {
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
            if (it->block) return &*it;
        }
        return nullptr;
    }

    void append_text(const std::string& raw) {
        for (char c : raw) {
            const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f';
            if (space) {
                if (!text_.empty() && text_.back() != ' ') text_.push_back(' ');
            } else {
                text_.push_back(c);
            }
        }
        // U+00A0 from &nbsp; behaves as a space for layout.
        for (std::size_t p = text_.find("\xc2\xa0"); p != std::string::npos; p = text_.find("\xc2\xa0")) {
            text_.replace(p, 2, " ");
        }
        if (!text_href_ && text_.find_first_not_of(' ') != std::string::npos) text_href_ = current_href();
    }

    void flush_text() {
        std::string s = text_;
        text_.clear();
        auto href = std::move(text_href_);
        text_href_.reset();
        const auto first = s.find_first_not_of(' ');
        if (first == std::string::npos) return;
        s = s.substr(first, s.find_last_not_of(' ') - first + 1);

        const OpenElement* block = innermost_block();
        LayoutBox box;
        box.kind = BoxKind::text_block;
        box.source = html::sanitize_utf8(s);
        box.font_size = font_for(block ? block->tag : "p");
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
            if (!it->color.empty()) {
                box.color = it->color;
                break;
            }
        }
        box.x = 0;
        box.y = y_;
        box.w = kFallbackCanvasWidth;
        box.h = static_cast<double>(text_height(box.source, box.font_size, kFallbackCanvasWidth));
        box.href = std::move(href);
        y_ += box.h;
        out_.boxes.push_back(std::move(box));
    }

    std::optional<ImageInfo> probe(const std::string& url) const {
        if (auto idx = snap_.find(url); idx && snap_.resources[*idx].body) return probe_image(*snap_.resources[*idx].body);
        return std::nullopt;
    }

    void image(const html::Token& t) {
        const std::string* src = t.attr("src");
        if (src == nullptr || src->empty()) return;
        const std::string url = html::resolve_url(base_, *src);
        auto w = px_attr(t, "width");
        auto h = px_attr(t, "height");
        if (!w || !h) {
            if (auto info = probe(url); info && info->width > 0 && info->height > 0) {
                if (w) {
                    h = *w * info->height / info->width;
                } else if (h) {
                    w = *h * info->width / info->height;
                } else {
                    w = info->width;
                    h = info->height;
                }
            }
        }
        if (!w || !h) {
            out_.notes.push_back("image " + url + " has no intrinsic size; assuming 16:9 at full width");
            w = kFallbackCanvasWidth;
            h = std::round(kFallbackCanvasWidth * 9.0 / 16.0);
        }
        if (*w <= 2 || *h <= 2) {
            out_.notes.push_back("dropped tracking pixel " + url);
            return;
        }
        flush_text();
        place(BoxKind::image, url, *w, *h, current_href());
    }

    void video_start(const html::Token& t) {
        flush_text();
        video_w_ = px_attr(t, "width").value_or(kFallbackCanvasWidth);
        video_h_ = px_attr(t, "height").value_or(std::round(video_w_ * 9.0 / 16.0));
        pending_video_ = true;
        if (const auto* src = t.attr("src"); src && !src->empty()) emit_video(html::resolve_url(base_, *src));
    }

    void emit_video(const std::string& url) {
        pending_video_ = false;
        place(BoxKind::video, url, video_w_, video_h_, std::nullopt);
    }

    void place(BoxKind kind, const std::string& url, double w, double h, std::optional<std::string> href) {
        if (w > kFallbackCanvasWidth) {
            h = std::round(h * kFallbackCanvasWidth / w);
            w = kFallbackCanvasWidth;
        }
        LayoutBox box;
        box.kind = kind;
        box.source = url;
        box.x = 0;
        box.y = y_;
        box.w = std::round(w);
        box.h = std::max(1.0, std::round(h));
        box.href = std::move(href);
        y_ += box.h;
        out_.boxes.push_back(std::move(box));
    }

    void input(const html::Token& t) {
        const std::string* type = t.attr("type");
        const std::string kind = type ? *type : "text";
        if (kind == "hidden" || kind == "submit" || kind == "button" || kind == "checkbox" || kind == "radio" ||
            kind == "image" || kind == "reset" || kind == "file") {
            return;
        }
        flush_text();
        LayoutBox box;
        box.kind = BoxKind::input;
        const std::string* name = t.attr("name");
        box.source = name && !name->empty() ? *name : "field" + std::to_string(++field_counter_);
        if (const auto* ph = t.attr("placeholder")) box.placeholder = html::sanitize_utf8(*ph);
        box.x = 0;
        box.y = y_;
        box.w = kFallbackCanvasWidth;
        box.h = static_cast<double>(line_height(20) + 16);
        y_ += box.h;
        out_.boxes.push_back(std::move(box));
    }

    const HtmlPageSnapshot& snap_;
    std::string base_;
    LayoutResult out_;
    std::vector<OpenElement> stack_;
    std::string text_;
    std::optional<std::string> text_href_;
    double y_ = 0;
    bool pending_video_ = false;
    double video_w_ = 0;
    double video_h_ = 0;
    int field_counter_ = 0;
};

}  // namespace

LayoutResult fallback_layout(const HtmlPageSnapshot& snap) {
    if (snap.resources.empty()) throw Error(Errc::parse_failure, "snapshot has no root document");
    const std::size_t doc = root_document(snap);
    const auto& root = snap.resources[doc];
    if (!root.is_html() || !root.body) {
        throw Error(Errc::parse_failure, "root document " + root.url + " is not captured HTML");
    }
    const auto tokens = html::tokenize(*root.body);
    const bool has_markup = std::any_of(tokens.begin(), tokens.end(),
                                        [](const auto& t) { return t.kind == html::Token::Kind::start_tag; });
    if (!has_markup) throw Error(Errc::parse_failure, "root document " + root.url + " contains no HTML elements");
    return FlowLayout(snap, doc).run(tokens);
}

}  // namespace gaius::convert
