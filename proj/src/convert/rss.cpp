#include "gaius/convert/rss.hpp"

#include "gaius/common/error.hpp"
#include "gaius/convert/html.hpp"
#include "gaius/convert/text_metrics.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <sstream>

namespace gaius::convert {

namespace pt = boost::property_tree;

namespace {

std::string collapse(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

struct StrippedMarkup {
    std::string text;
    std::optional<std::string> first_image;
};

// Feed descriptions are frequently escaped HTML.
StrippedMarkup strip_markup(std::string_view markup, std::string_view base) {
    StrippedMarkup out;
    std::string text;
    bool skip = false;
    for (const auto& t : html::tokenize(markup)) {
        using Kind = html::Token::Kind;
        if (t.kind == Kind::text) {
            if (!skip) text += t.text;
            skip = false;
            continue;
        }
        skip = false;
        if (t.kind != Kind::start_tag && t.kind != Kind::end_tag) continue;
        if (t.kind == Kind::start_tag && (t.name == "script" || t.name == "style")) skip = true;
        if (t.kind == Kind::start_tag && t.name == "img" && !out.first_image) {
            if (const auto* src = t.attr("src"); src && !src->empty()) out.first_image = html::resolve_url(base, *src);
        }
        text.push_back(' ');
    }
    for (auto p = text.find("\xc2\xa0"); p != std::string::npos; p = text.find("\xc2\xa0")) text.replace(p, 2, " ");
    out.text = html::sanitize_utf8(collapse(text));
    return out;
}

std::string child_text(const pt::ptree& node, const char* key) {
    auto c = node.get_child_optional(key);
    return c ? c->data() : std::string();
}

std::string attr(const pt::ptree& node, const char* key) {
    auto a = node.get_child_optional("<xmlattr>");
    if (!a) return {};
    return a->get<std::string>(key, "");
}

bool looks_like_image(std::string_view type, std::string_view url) {
    if (type.starts_with("image/")) return true;
    if (!type.empty()) return false;
    for (std::string_view ext : {".jpg", ".jpeg", ".png", ".gif", ".webp"}) {
        auto q = url.find('?');
        if (url.substr(0, q).ends_with(ext)) return true;
    }
    return false;
}

std::optional<Timestamp> date_of(const pt::ptree& node, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        const auto s = child_text(node, key);
        if (s.empty()) continue;
        try {
            return parse_utc(s);
        } catch (const Error&) {
        }
    }
    return std::nullopt;
}

std::optional<std::string> media_image(const pt::ptree& node) {
    for (const auto& [key, child] : node) {
        if (key == "enclosure" && looks_like_image(attr(child, "type"), attr(child, "url")) && !attr(child, "url").empty()) {
            return attr(child, "url");
        }
        if (key == "media:content" && !attr(child, "url").empty() &&
            (attr(child, "medium") == "image" || looks_like_image(attr(child, "type"), attr(child, "url")))) {
            return attr(child, "url");
        }
        if (key == "media:thumbnail" && !attr(child, "url").empty()) return attr(child, "url");
        if (key == "itunes:image" && !attr(child, "href").empty()) return attr(child, "href");
        if (key == "media:group") {
            if (auto inner = media_image(child)) return inner;
        }
    }
    return std::nullopt;
}

RssItem rss_item(const pt::ptree& node, std::string_view base) {
    RssItem item;
    item.title = html::sanitize_utf8(collapse(strip_markup(child_text(node, "title"), base).text));
    std::string desc = child_text(node, "description");
    if (desc.empty()) desc = child_text(node, "content:encoded");
    auto stripped = strip_markup(desc, base);
    item.description = std::move(stripped.text);
    item.link = collapse(child_text(node, "link"));
    if (item.link.empty()) {
        if (auto guid = node.get_child_optional("guid"); guid && attr(*guid, "isPermaLink") != "false") {
            item.link = collapse(guid->data());
        }
    }
    item.image_url = media_image(node);
    if (!item.image_url) {
        if (auto from_encoded = strip_markup(child_text(node, "content:encoded"), base).first_image) {
            item.image_url = from_encoded;
        } else {
            item.image_url = stripped.first_image;
        }
    }
    item.published_at = date_of(node, {"pubDate", "dc:date", "published", "updated"});
    return item;
}

RssItem atom_entry(const pt::ptree& node, std::string_view base) {
    RssItem item;
    item.title = strip_markup(child_text(node, "title"), base).text;
    std::string body = child_text(node, "summary");
    if (body.empty()) body = child_text(node, "content");
    auto stripped = strip_markup(body, base);
    item.description = std::move(stripped.text);
    for (const auto& [key, child] : node) {
        if (key != "link") continue;
        const auto rel = attr(child, "rel");
        const auto href = attr(child, "href");
        if ((rel.empty() || rel == "alternate") && item.link.empty()) item.link = href;
        if (rel == "enclosure" && looks_like_image(attr(child, "type"), href) && !item.image_url) item.image_url = href;
    }
    if (!item.image_url) item.image_url = media_image(node);
    if (!item.image_url) item.image_url = stripped.first_image;
    item.published_at = date_of(node, {"published", "updated"});
    return item;
}

std::string truncate(const std::string& s, std::size_t max_chars) {
    if (code_points(s) <= max_chars) return s;
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if ((static_cast<unsigned char>(s[i]) & 0xc0) != 0x80) {
            if (count == max_chars) break;
            ++count;
        }
        ++i;
    }
    std::string out = s.substr(0, i);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\xe2\x80\xa6";
}

}  // namespace

RssFeed parse_feed(std::string_view xml, std::string_view source_url, Timestamp fetched_at) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw Error(Errc::parse_failure, "line " + std::to_string(e.line()) + ": " + e.message());
    }

    RssFeed feed;
    feed.source_url = std::string(source_url);
    feed.fetched_at = fetched_at;
    std::string base(source_url);

    if (auto rss = tree.get_child_optional("rss")) {
        auto channel = rss->get_child_optional("channel");
        if (!channel) throw Error(Errc::parse_failure, "rss document has no <channel>");
        feed.title = collapse(child_text(*channel, "title"));
        if (base.empty()) base = collapse(child_text(*channel, "link"));
        for (const auto& [key, child] : *channel) {
            if (key == "item") feed.items.push_back(rss_item(child, base));
        }
    } else if (auto rdf = tree.get_child_optional("rdf:RDF")) {
        if (auto channel = rdf->get_child_optional("channel")) feed.title = collapse(child_text(*channel, "title"));
        for (const auto& [key, child] : *rdf) {
            if (key == "item") feed.items.push_back(rss_item(child, base));
        }
    } else if (auto atom = tree.get_child_optional("feed")) {
        feed.title = strip_markup(child_text(*atom, "title"), base).text;
        for (const auto& [key, child] : *atom) {
            if (key == "entry") feed.items.push_back(atom_entry(child, base));
        }
    } else {
        throw Error(Errc::parse_failure, "document is neither RSS nor Atom");
    }
    feed.title = html::sanitize_utf8(feed.title);

    std::erase_if(feed.items, [](const RssItem& i) { return i.link.empty(); });
    for (auto& item : feed.items) {
        if (!base.empty()) item.link = html::resolve_url(base, item.link);
        if (item.image_url && !base.empty()) item.image_url = html::resolve_url(base, *item.image_url);
    }
    std::stable_sort(feed.items.begin(), feed.items.end(), [](const RssItem& a, const RssItem& b) {
        if (a.published_at && b.published_at) return *a.published_at > *b.published_at;
        return a.published_at.has_value() && !b.published_at.has_value();
    });
    return feed;
}

maml::Page translate_rss(const RssFeed& feed, const RssLayoutParams& layout) {
    maml::Page page;
    page.page_id = layout.page_id;
    page.title = layout.title.empty() ? feed.title : layout.title;
    page.language = layout.language;
    page.location = layout.location;
    page.author_id = layout.author_id;
    page.community_id = layout.community_id;
    page.canvas_width = layout.canvas_width;
    page.created_at = feed.fetched_at;
    page.updated_at = feed.fetched_at;

    const double x = layout.margin;
    const std::int64_t width = std::max<std::int64_t>(1, layout.canvas_width - 2 * layout.margin);
    double y = layout.margin;
    for (const auto& item : feed.items) {
        page.objects.push_back(maml::Image{item.image_url.value_or(layout.placeholder_image),
                                           maml::Box{x, y, width, layout.image_height}, item.link});
        y += layout.image_height + layout.caption_gap;

        maml::Text title;
        title.txt = item.title;
        title.box = maml::Box{x, y, width, text_height(item.title, layout.title_font, static_cast<double>(width))};
        title.font = layout.title_font;
        title.font_type = layout.font_type;
        title.color = layout.title_color;
        title.href = item.link;
        y += static_cast<double>(title.box.h) + layout.caption_gap;
        page.objects.push_back(std::move(title));

        maml::Text desc;
        desc.txt = truncate(item.description, layout.max_description_chars);
        desc.box = maml::Box{x, y, width, text_height(desc.txt, layout.description_font, static_cast<double>(width))};
        desc.font = layout.description_font;
        desc.font_type = layout.font_type;
        desc.color = layout.description_color;
        y += static_cast<double>(desc.box.h) + layout.item_gap;
        page.objects.push_back(std::move(desc));
    }
    return page;
}

}  // namespace gaius::convert
