#include "gaius/convert/snapshot.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/convert/html.hpp"

#include <json.hpp>

#include <array>
#include <deque>

namespace gaius::convert {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view trigger_name(Trigger t) noexcept {
    switch (t) {
        case Trigger::parse: return "parse";
        case Trigger::script: return "script";
        case Trigger::redirect: return "redirect";
        case Trigger::stylesheet: return "stylesheet";
    }
    return "parse";
}

Trigger trigger_from_name(std::string_view name) {
    if (name == "parse") return Trigger::parse;
    if (name == "script") return Trigger::script;
    if (name == "redirect") return Trigger::redirect;
    if (name == "stylesheet") return Trigger::stylesheet;
    throw Error(Errc::invalid_argument, "unknown trigger kind: " + std::string(name));
}

std::string_view box_kind_name(BoxKind k) noexcept {
    switch (k) {
        case BoxKind::image: return "image";
        case BoxKind::text_block: return "text-block";
        case BoxKind::block: return "block";
        case BoxKind::video: return "video";
        case BoxKind::input: return "input";
        case BoxKind::link: return "link";
    }
    return "block";
}

BoxKind box_kind_from_name(std::string_view name) {
    static constexpr std::array<BoxKind, 6> kAll{BoxKind::image, BoxKind::text_block, BoxKind::block,
                                                 BoxKind::video, BoxKind::input,      BoxKind::link};
    for (auto k : kAll) {
        if (box_kind_name(k) == name) return k;
    }
    throw Error(Errc::invalid_argument, "unknown layout box kind: " + std::string(name));
}

std::optional<std::size_t> HtmlPageSnapshot::find(std::string_view u) const noexcept {
    for (std::size_t i = 0; i < resources.size(); ++i) {
        if (resources[i].url == u) return i;
    }
    return std::nullopt;
}

std::uint64_t HtmlPageSnapshot::total_bytes() const noexcept {
    std::uint64_t total = 0;
    for (const auto& r : resources) total += r.byte_size;
    return total;
}

void check_snapshot(const HtmlPageSnapshot& snap) {
    const std::size_t n = snap.resources.size();
    if (n == 0) throw Error(Errc::empty_snapshot, "snapshot has no resources");
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (const auto& e : snap.edges) {
        if (e.parent >= n || e.child >= n) throw Error(Errc::invalid_argument, "request edge out of range");
        if (e.child == 0) throw Error(Errc::invalid_argument, "root document must not have a parent");
        ++indegree[e.child];
        children[e.parent].push_back(e.child);
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (indegree[i] == 0) {
            throw Error(Errc::invalid_argument, "resource " + snap.resources[i].url + " is not reachable from the root");
        }
    }
    std::deque<std::size_t> ready{0};
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto i = ready.front();
        ready.pop_front();
        ++visited;
        for (auto c : children[i]) {
            if (--indegree[c] == 0) ready.push_back(c);
        }
    }
    if (visited != n) throw Error(Errc::cyclic_graph, "request graph has a cycle");

    if (snap.layout_boxes) {
        for (const auto& b : *snap.layout_boxes) {
            if ((b.kind == BoxKind::image || b.kind == BoxKind::video) && !snap.find(b.source)) {
                throw Error(Errc::invalid_argument, "layout box references unknown resource " + b.source);
            }
        }
    }
}

std::size_t root_document(const HtmlPageSnapshot& snap) {
    std::size_t cur = 0;
    for (std::size_t hops = 0; hops < snap.resources.size(); ++hops) {
        if (snap.resources.at(cur).is_html() && snap.resources[cur].body) return cur;
        std::optional<std::size_t> next;
        for (const auto& e : snap.edges) {
            if (e.parent == cur && e.trigger == Trigger::redirect) {
                next = e.child;
                break;
            }
        }
        if (!next) break;
        cur = *next;
    }
    return cur;
}

namespace {

std::string extension_for(const Resource& r) {
    const auto& m = r.mime;
    if (m.starts_with("text/html")) return ".html";
    if (m.starts_with("text/css")) return ".css";
    if (m.find("javascript") != std::string::npos) return ".js";
    if (m == "image/jpeg") return ".jpg";
    if (m == "image/png") return ".png";
    if (m == "image/gif") return ".gif";
    if (m == "video/mp4") return ".mp4";
    return ".bin";
}

std::string base64_decode(std::string_view in) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+' || c == '-') return 62;
        if (c == '/' || c == '_') return 63;
        return -1;
    };
    std::string out;
    unsigned buf = 0;
    int bits = 0;
    for (char c : in) {
        const int v = value(c);
        if (v < 0) continue;
        buf = (buf << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buf >> bits) & 0xff));
        }
    }
    return out;
}

}  // namespace

HtmlPageSnapshot load_snapshot(const fs::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw Error(Errc::parse_failure, (dir / "manifest.json").string() + ": " + e.what());
    }
    HtmlPageSnapshot snap;
    try {
        snap.url = manifest.at("url").get<std::string>();
        snap.title = manifest.value("title", "");
        snap.viewport_width = manifest.value("viewport_width", 1080.0);
        for (const auto& r : manifest.at("resources")) {
            Resource res;
            res.url = r.at("url").get<std::string>();
            res.mime = r.value("mime", "application/octet-stream");
            res.byte_size = r.value("size", std::uint64_t{0});
            if (r.contains("file")) {
                res.body = read_file(dir / r.at("file").get<std::string>());
                res.byte_size = res.body->size();
            }
            if (r.contains("poster")) res.poster = r.at("poster").get<std::string>();
            snap.resources.push_back(std::move(res));
        }
        for (const auto& e : manifest.value("edges", json::array())) {
            snap.edges.push_back(RequestEdge{e.at("parent").get<std::size_t>(), e.at("child").get<std::size_t>(),
                                             trigger_from_name(e.value("trigger", "parse"))});
        }
        if (manifest.contains("layout_boxes")) {
            std::vector<LayoutBox> boxes;
            for (const auto& b : manifest.at("layout_boxes")) {
                LayoutBox box;
                box.kind = box_kind_from_name(b.at("kind").get<std::string>());
                box.source = b.value("source", "");
                box.x = b.at("x").get<double>();
                box.y = b.at("y").get<double>();
                box.w = b.at("w").get<double>();
                box.h = b.at("h").get<double>();
                if (b.contains("href")) box.href = b.at("href").get<std::string>();
                if (b.contains("background")) box.background = b.at("background").get<std::string>();
                box.font_size = b.value("font_size", 20);
                box.color = b.value("color", "#000000");
                box.placeholder = b.value("placeholder", "");
                boxes.push_back(std::move(box));
            }
            snap.layout_boxes = std::move(boxes);
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse_failure, (dir / "manifest.json").string() + ": " + e.what());
    }
    check_snapshot(snap);
    return snap;
}

void save_snapshot(const HtmlPageSnapshot& snap, const fs::path& dir) {
    ordered_json m;
    m["url"] = snap.url;
    if (!snap.title.empty()) m["title"] = snap.title;
    m["viewport_width"] = snap.viewport_width;
    m["resources"] = ordered_json::array();
    for (std::size_t i = 0; i < snap.resources.size(); ++i) {
        const auto& r = snap.resources[i];
        ordered_json j;
        j["url"] = r.url;
        j["mime"] = r.mime;
        j["size"] = r.byte_size;
        if (r.body) {
            const std::string file = "files/" + std::to_string(i) + extension_for(r);
            write_file_atomic(dir / file, *r.body);
            j["file"] = file;
        }
        if (r.poster) j["poster"] = *r.poster;
        m["resources"].push_back(std::move(j));
    }
    m["edges"] = ordered_json::array();
    for (const auto& e : snap.edges) {
        m["edges"].push_back({{"parent", e.parent}, {"child", e.child}, {"trigger", trigger_name(e.trigger)}});
    }
    if (snap.layout_boxes) {
        m["layout_boxes"] = ordered_json::array();
        for (const auto& b : *snap.layout_boxes) {
            ordered_json j;
            j["kind"] = box_kind_name(b.kind);
            j["source"] = b.source;
            j["x"] = b.x;
            j["y"] = b.y;
            j["w"] = b.w;
            j["h"] = b.h;
            if (b.href) j["href"] = *b.href;
            if (b.background) j["background"] = *b.background;
            j["font_size"] = b.font_size;
            j["color"] = b.color;
            if (!b.placeholder.empty()) j["placeholder"] = b.placeholder;
            m["layout_boxes"].push_back(std::move(j));
        }
    }
    write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

HtmlPageSnapshot import_har(std::string_view har_json) {
    json har;
    try {
        har = json::parse(har_json.begin(), har_json.end());
    } catch (const json::exception& e) {
        throw Error(Errc::parse_failure, std::string("HAR: ") + e.what());
    }
    HtmlPageSnapshot snap;
    try {
        const auto& log = har.at("log");
        if (log.contains("pages") && !log["pages"].empty()) snap.title = log["pages"][0].value("title", "");
        const auto& entries = log.at("entries");
        if (entries.empty()) throw Error(Errc::empty_snapshot, "HAR has no entries");

        std::vector<std::string> redirect_to;
        for (const auto& entry : entries) {
            Resource r;
            r.url = entry.at("request").at("url").get<std::string>();
            const auto& resp = entry.at("response");
            const auto& content = resp.value("content", json::object());
            r.mime = content.value("mimeType", "application/octet-stream");
            if (auto semi = r.mime.find(';'); semi != std::string::npos) r.mime.resize(semi);
            const auto content_size = content.value("size", std::int64_t{-1});
            const auto body_size = resp.value("bodySize", std::int64_t{-1});
            r.byte_size = static_cast<std::uint64_t>(std::max<std::int64_t>({0, content_size, body_size}));
            if (content.contains("text") && content["text"].is_string()) {
                const auto text = content["text"].get<std::string>();
                r.body = content.value("encoding", "") == "base64" ? base64_decode(text) : text;
                r.byte_size = std::max<std::uint64_t>(r.byte_size, r.body->size());
            }
            const auto location = resp.value("redirectURL", "");
            redirect_to.push_back(location.empty() ? std::string() : html::resolve_url(r.url, location));
            snap.resources.push_back(std::move(r));
        }
        snap.url = snap.resources[0].url;

        auto latest_before = [&](std::size_t limit, std::string_view u) -> std::optional<std::size_t> {
            for (std::size_t k = limit; k-- > 0;) {
                if (snap.resources[k].url == u) return k;
            }
            return std::nullopt;
        };
        std::optional<std::size_t> first_document;
        for (std::size_t i = 1; i < snap.resources.size(); ++i) {
            const auto& entry = entries[i];
            std::optional<std::size_t> parent;
            Trigger trigger = Trigger::parse;
            for (std::size_t k = i; k-- > 0;) {
                if (redirect_to[k] == snap.resources[i].url) {
                    parent = k;
                    trigger = Trigger::redirect;
                    break;
                }
            }
            if (!parent && entry.contains("_initiator")) {
                const auto& init = entry["_initiator"];
                const auto type = init.value("type", "");
                std::string from = init.value("url", "");
                if (from.empty() && init.contains("stack")) {
                    const auto& frames = init["stack"].value("callFrames", json::array());
                    if (!frames.empty()) from = frames[0].value("url", "");
                }
                if (!from.empty()) parent = latest_before(i, from);
                if (parent) {
                    const bool css_parent = snap.resources[*parent].mime.starts_with("text/css");
                    trigger = type == "script" ? Trigger::script : (css_parent ? Trigger::stylesheet : Trigger::parse);
                }
            }
            if (!parent) parent = first_document.value_or(0);
            snap.edges.push_back(RequestEdge{*parent, i, trigger});
            if (!first_document && snap.resources[i].is_html() && trigger == Trigger::redirect) first_document = i;
        }
        if (!first_document && snap.resources[0].is_html()) first_document = 0;
    } catch (const json::exception& e) {
        throw Error(Errc::parse_failure, std::string("HAR: ") + e.what());
    }
    check_snapshot(snap);
    return snap;
}

}  // namespace gaius::convert
