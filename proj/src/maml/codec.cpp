#include "gaius/maml/codec.hpp"

#include "gaius/common/error.hpp"
#include "gaius/maml/validate.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <set>

namespace gaius::maml {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view parse_errc_name(ParseErrc code) noexcept {
    switch (code) {
        case ParseErrc::syntax: return "SyntaxError";
        case ParseErrc::unknown_object_type: return "UnknownObjectType";
        case ParseErrc::missing_field: return "MissingField";
        case ParseErrc::unknown_field: return "UnknownField";
        case ParseErrc::range: return "RangeError";
    }
    return "ParseError";
}

ParseError::ParseError(ParseErrc code, std::size_t byte_offset, long object_index, const std::string& detail)
    : std::runtime_error(std::string(parse_errc_name(code)) + " at byte " + std::to_string(byte_offset) +
                         (object_index >= 0 ? " (object " + std::to_string(object_index) + ")" : std::string()) +
                         ": " + detail),
      code_(code),
      byte_offset_(byte_offset),
      object_index_(object_index) {}

namespace {

// Byte offsets of the elements of the top-level "objects" array. Only called
// on text nlohmann already accepted, so the scan can assume well-formedness.
std::vector<std::size_t> object_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    std::vector<char> stack;
    bool objects_next = false;
    bool in_objects = false;
    bool expect_element = false;
    std::size_t objects_depth = 0;
    std::string last_key;
    bool reading_key = false;

    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (in_objects && expect_element && stack.size() == objects_depth && c != ']') {
            offsets.push_back(i);
            expect_element = false;
        }
        switch (c) {
            case '"': {
                const std::size_t start = ++i;
                while (i < text.size() && text[i] != '"') i += (text[i] == '\\') ? 2 : 1;
                if (stack.size() == 1 && stack.back() == '{' && reading_key) {
                    last_key = std::string(text.substr(start, i - start));
                }
                ++i;
                continue;
            }
            case ':':
                reading_key = false;
                if (stack.size() == 1 && last_key == "objects") objects_next = true;
                break;
            case ',':
                if (stack.size() == 1) reading_key = true;
                if (in_objects && stack.size() == objects_depth) expect_element = true;
                break;
            case '{':
            case '[':
                stack.push_back(c);
                if (stack.size() == 1) reading_key = true;
                if (objects_next && stack.size() == 2 && c == '[') {
                    in_objects = true;
                    expect_element = true;
                    objects_depth = 2;
                }
                objects_next = false;
                break;
            case '}':
            case ']':
                if (in_objects && stack.size() == objects_depth) in_objects = false;
                if (!stack.empty()) stack.pop_back();
                break;
            default:
                if (stack.size() == 1) objects_next = false;
                break;
        }
        ++i;
    }
    return offsets;
}

class Reader {
public:
    Reader(std::string_view text, const ParseOptions& opts) : text_(text), opts_(opts) {}

    ParseResult run() {
        json doc;
        try {
            doc = json::parse(text_.begin(), text_.end());
        } catch (const json::parse_error& e) {
            throw ParseError(ParseErrc::syntax, e.byte > 0 ? e.byte - 1 : 0, -1, e.what());
        } catch (const json::exception& e) {
            throw ParseError(ParseErrc::syntax, 0, -1, e.what());
        }
        if (!doc.is_object()) fail(ParseErrc::syntax, -1, "document root must be an object");
        check_keys(doc, {"page", "objects"}, -1);

        ParseResult out;
        if (auto it = doc.find("page"); it != doc.end()) read_meta(*it, out.page);

        auto objs = doc.find("objects");
        if (objs == doc.end()) fail(ParseErrc::missing_field, -1, "missing \"objects\"");
        if (!objs->is_array()) fail(ParseErrc::syntax, -1, "\"objects\" must be an array");
        out.page.objects.reserve(objs->size());
        long index = 0;
        for (const auto& item : *objs) {
            out.page.objects.push_back(read_object(item, index));
            ++index;
        }
        out.notes = std::move(notes_);

        if (opts_.enforce_invariants) {
            const auto violations = validate(out.page);
            if (!violations.empty()) {
                const auto& v = violations.front();
                fail(ParseErrc::range, v.object_index, v.field + " violates " + v.rule);
            }
        }
        return out;
    }

private:
    [[noreturn]] void fail(ParseErrc code, long index, const std::string& detail) {
        std::size_t offset = 0;
        if (index >= 0) {
            if (offsets_.empty()) offsets_ = object_offsets(text_);
            if (static_cast<std::size_t>(index) < offsets_.size()) offset = offsets_[static_cast<std::size_t>(index)];
        }
        throw ParseError(code, offset, index, detail);
    }

    void note(long index, const std::string& what) {
        notes_.push_back((index >= 0 ? "object " + std::to_string(index) + ": " : std::string("page: ")) + what);
    }

    void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, long index) {
        for (const auto& [key, value] : obj.items()) {
            bool known = false;
            for (auto a : allowed) known = known || key == a;
            if (known) continue;
            if (opts_.strict) fail(ParseErrc::unknown_field, index, "unknown field \"" + key + "\"");
            note(index, "ignored unknown field \"" + key + "\"");
        }
    }

    const json* field(const json& obj, const char* key, bool required, long index) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(ParseErrc::missing_field, index, std::string("missing \"") + key + "\"");
            return nullptr;
        }
        return &*it;
    }

    std::string str(const json& obj, const char* key, long index) {
        return *opt_str(obj, key, true, index);
    }

    std::optional<std::string> opt_str(const json& obj, const char* key, bool required, long index) {
        const json* v = field(obj, key, required, index);
        if (v == nullptr) return std::nullopt;
        if (!v->is_string()) fail(ParseErrc::syntax, index, std::string("\"") + key + "\" must be a string");
        return v->get<std::string>();
    }

    double number(const json& obj, const char* key, long index) {
        const json* v = field(obj, key, true, index);
        if (!v->is_number()) fail(ParseErrc::syntax, index, std::string("\"") + key + "\" must be a number");
        return v->get<double>();
    }

    double coordinate(const json& obj, const char* key, long index) {
        const double v = number(obj, key, index);
        if (!std::isfinite(v) || std::fabs(v) > kMaxCoordinate) {
            fail(ParseErrc::range, index, std::string("\"") + key + "\" out of range");
        }
        return v;
    }

    // w, h and font are integers on the wire; fractional input rounds half-up.
    std::int64_t integer(const json& obj, const char* key, long index) {
        const double v = coordinate(obj, key, index);
        const double r = std::floor(v + 0.5);
        if (r != v) note(index, std::string(key) + " " + json(v).dump() + " rounded to " + json(r).dump());
        return static_cast<std::int64_t>(r);
    }

    Box box(const json& obj, long index) {
        Box b;
        b.x = coordinate(obj, "x", index);
        b.y = coordinate(obj, "y", index);
        b.w = integer(obj, "w", index);
        b.h = integer(obj, "h", index);
        return b;
    }

    std::string color(const json& obj, long index) {
        const std::string raw = str(obj, "color", index);
        std::string c = normalize_color(raw);
        if (c != raw) note(index, "color " + raw + " normalized to " + c);
        return c;
    }

    Object read_object(const json& item, long index) {
        if (!item.is_object()) fail(ParseErrc::syntax, index, "object entry must be a JSON object");
        const std::string type = str(item, "type", index);
        if (type == "img") {
            check_keys(item, {"type", "url", "x", "y", "w", "h", "href"}, index);
            Image img;
            img.url = str(item, "url", index);
            img.box = box(item, index);
            img.href = opt_str(item, "href", false, index);
            return img;
        }
        if (type == "txt") {
            check_keys(item, {"type", "txt", "x", "y", "w", "h", "font", "font-type", "color", "href"}, index);
            Text t;
            t.txt = str(item, "txt", index);
            t.box = box(item, index);
            t.font = integer(item, "font", index);
            t.font_type = str(item, "font-type", index);
            t.color = color(item, index);
            t.href = opt_str(item, "href", false, index);
            return t;
        }
        if (type == "rect") {
            check_keys(item, {"type", "x", "y", "w", "h", "color"}, index);
            Rect r;
            r.box = box(item, index);
            r.color = color(item, index);
            return r;
        }
        if (type == "video") {
            check_keys(item, {"type", "url", "x", "y", "w", "h", "href"}, index);
            Video v;
            v.url = str(item, "url", index);
            v.box = box(item, index);
            v.href = opt_str(item, "href", false, index);
            return v;
        }
        if (type == "text-field") {
            check_keys(item, {"type", "name", "placeholder", "x", "y", "w", "h"}, index);
            TextField f;
            f.name = str(item, "name", index);
            f.placeholder = opt_str(item, "placeholder", false, index).value_or("");
            f.box = box(item, index);
            return f;
        }
        if (type == "button") {
            check_keys(item, {"type", "label", "action", "x", "y", "w", "h", "color"}, index);
            Button b;
            b.label = str(item, "label", index);
            b.action = str(item, "action", index);
            b.box = box(item, index);
            b.color = color(item, index);
            return b;
        }
        fail(ParseErrc::unknown_object_type, index, "unknown object type \"" + type + "\"");
    }

    void read_meta(const json& meta, Page& page) {
        if (!meta.is_object()) fail(ParseErrc::syntax, -1, "\"page\" must be an object");
        check_keys(meta,
                   {"id", "title", "language", "location", "author", "community", "canvas_width", "canvas_height",
                    "version", "created_at", "updated_at"},
                   -1);
        page.page_id = opt_str(meta, "id", false, -1).value_or("");
        page.title = opt_str(meta, "title", false, -1).value_or("");
        page.language = opt_str(meta, "language", false, -1).value_or("");
        page.author_id = opt_str(meta, "author", false, -1).value_or("");
        page.community_id = opt_str(meta, "community", false, -1);
        if (const json* loc = field(meta, "location", false, -1)) {
            if (!loc->is_object()) fail(ParseErrc::syntax, -1, "\"location\" must be an object");
            check_keys(*loc, {"lat", "lon"}, -1);
            page.location = GeoPoint{number(*loc, "lat", -1), number(*loc, "lon", -1)};
        }
        if (meta.contains("canvas_width")) page.canvas_width = integer(meta, "canvas_width", -1);
        if (meta.contains("canvas_height")) {
            // Derived from the objects; the stored value is informational.
            (void)integer(meta, "canvas_height", -1);
        }
        if (meta.contains("version")) page.version = integer(meta, "version", -1);
        page.created_at = timestamp(meta, "created_at");
        page.updated_at = timestamp(meta, "updated_at");
    }

    Timestamp timestamp(const json& meta, const char* key) {
        auto s = opt_str(meta, key, false, -1);
        if (!s) return Timestamp{};
        try {
            return parse_utc(*s);
        } catch (const Error& e) {
            fail(ParseErrc::syntax, -1, std::string("\"") + key + "\": " + e.what());
        }
    }

    std::string_view text_;
    const ParseOptions& opts_;
    std::vector<std::string> notes_;
    std::vector<std::size_t> offsets_;
};

ordered_json number_json(double v) {
    if (std::trunc(v) == v && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    return v;
}

void put_box(ordered_json& j, const Box& b) {
    j["x"] = number_json(b.x);
    j["y"] = number_json(b.y);
    j["w"] = b.w;
    j["h"] = b.h;
}

ordered_json object_json(const Object& obj) {
    ordered_json j;
    j["type"] = std::string(type_tag(obj));
    if (const auto* o = std::get_if<Image>(&obj)) {
        j["url"] = o->url;
        put_box(j, o->box);
        if (o->href) j["href"] = *o->href;
    } else if (const auto* o = std::get_if<Text>(&obj)) {
        j["txt"] = o->txt;
        put_box(j, o->box);
        j["font"] = o->font;
        j["font-type"] = o->font_type;
        j["color"] = o->color;
        if (o->href) j["href"] = *o->href;
    } else if (const auto* o = std::get_if<Rect>(&obj)) {
        put_box(j, o->box);
        j["color"] = o->color;
    } else if (const auto* o = std::get_if<Video>(&obj)) {
        j["url"] = o->url;
        put_box(j, o->box);
        if (o->href) j["href"] = *o->href;
    } else if (const auto* o = std::get_if<TextField>(&obj)) {
        j["name"] = o->name;
        j["placeholder"] = o->placeholder;
        put_box(j, o->box);
    } else if (const auto* o = std::get_if<Button>(&obj)) {
        j["label"] = o->label;
        j["action"] = o->action;
        put_box(j, o->box);
        j["color"] = o->color;
    }
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

ParseResult parse_page_with_notes(std::string_view text, const ParseOptions& opts) {
    return Reader(text, opts).run();
}

Page parse_page(std::string_view text, const ParseOptions& opts) { return parse_page_with_notes(text, opts).page; }

std::string serialize_object(const Object& obj) { return dump(object_json(obj)); }

std::string serialize_page(const Page& page) {
    if (const auto violations = validate(page); !violations.empty()) {
        const auto& v = violations.front();
        throw Error(Errc::invariant_violation, "page fails validation: object " + std::to_string(v.object_index) +
                                                   " field " + v.field + " rule " + v.rule);
    }
    ordered_json meta;
    meta["id"] = page.page_id;
    meta["title"] = page.title;
    if (!page.language.empty()) meta["language"] = page.language;
    if (page.location) {
        meta["location"]["lat"] = number_json(page.location->lat);
        meta["location"]["lon"] = number_json(page.location->lon);
    }
    meta["author"] = page.author_id;
    if (page.community_id) meta["community"] = *page.community_id;
    meta["canvas_width"] = page.canvas_width;
    meta["canvas_height"] = page.canvas_height();
    meta["version"] = page.version;
    meta["created_at"] = format_utc(page.created_at);
    meta["updated_at"] = format_utc(page.updated_at);

    ordered_json doc;
    doc["page"] = std::move(meta);
    doc["objects"] = ordered_json::array();
    for (const auto& obj : page.objects) doc["objects"].push_back(object_json(obj));
    return dump(doc);
}

}  // namespace gaius::maml
