#include "gaius/convert/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace gaius::convert::html {

const std::string* Token::attr(std::string_view key) const noexcept {
    for (const auto& [k, v] : attrs) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = lower(c);
    return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp == 0 || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) cp = 0xfffd;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

constexpr std::array<std::pair<std::string_view, std::uint32_t>, 24> kNamedEntities{{
    {"amp", '&'},     {"lt", '<'},       {"gt", '>'},       {"quot", '"'},    {"apos", '\''},
    {"nbsp", 0xa0},   {"copy", 0xa9},    {"reg", 0xae},     {"trade", 0x2122}, {"hellip", 0x2026},
    {"mdash", 0x2014}, {"ndash", 0x2013}, {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201c},
    {"rdquo", 0x201d}, {"laquo", 0xab},   {"raquo", 0xbb},   {"middot", 0xb7}, {"bull", 0x2022},
    {"euro", 0x20ac}, {"pound", 0xa3},   {"rupee", 0x20b9}, {"deg", 0xb0},
}};

// Latin-1 letters U+00C0..U+00FF in code point order.
constexpr std::array<std::string_view, 64> kLatin1Letters{
    "Agrave", "Aacute", "Acirc",  "Atilde", "Auml",   "Aring",  "AElig",  "Ccedil", "Egrave", "Eacute", "Ecirc",
    "Euml",   "Igrave", "Iacute", "Icirc",  "Iuml",   "ETH",    "Ntilde", "Ograve", "Oacute", "Ocirc",  "Otilde",
    "Ouml",   "times",  "Oslash", "Ugrave", "Uacute", "Ucirc",  "Uuml",   "Yacute", "THORN",  "szlig",  "agrave",
    "aacute", "acirc",  "atilde", "auml",   "aring",  "aelig",  "ccedil", "egrave", "eacute", "ecirc",  "euml",
    "igrave", "iacute", "icirc",  "iuml",   "eth",    "ntilde", "ograve", "oacute", "ocirc",  "otilde", "ouml",
    "divide", "oslash", "ugrave", "uacute", "ucirc",  "uuml",   "yacute", "thorn",  "yuml",
};

constexpr std::array<std::string_view, 5> kRawText{"script", "style", "textarea", "title", "noscript"};

}  // namespace

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        const auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(text[i++]);
            continue;
        }
        const auto name = text.substr(i + 1, semi - i - 1);
        bool done = false;
        if (!name.empty() && name[0] == '#') {
            const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            const auto digits = std::string(name.substr(hex ? 2 : 1));
            if (!digits.empty() && digits.size() <= 8 &&
                std::all_of(digits.begin(), digits.end(),
                            [&](char c) { return hex ? std::isxdigit(static_cast<unsigned char>(c)) : std::isdigit(static_cast<unsigned char>(c)); })) {
                append_utf8(out, static_cast<std::uint32_t>(std::strtoul(digits.c_str(), nullptr, hex ? 16 : 10)));
                done = true;
            }
        } else {
            for (auto [n, cp] : kNamedEntities) {
                if (n == name) {
                    append_utf8(out, cp);
                    done = true;
                    break;
                }
            }
            for (std::size_t k = 0; !done && k < kLatin1Letters.size(); ++k) {
                if (kLatin1Letters[k] == name) {
                    append_utf8(out, static_cast<std::uint32_t>(0xc0 + k));
                    done = true;
                }
            }
        }
        if (done) {
            i = semi + 1;
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

std::string sanitize_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
        bool ok = len > 0 && i + len <= s.size();
        std::uint32_t cp = len == 1 ? c : len == 2 ? (c & 0x1f) : len == 3 ? (c & 0x0f) : (c & 0x07);
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            ok = (cc >> 6) == 0x2;
            cp = (cp << 6) | (cc & 0x3f);
        }
        if (ok && len > 1) {
            ok = !((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10ffff)) ||
                   (cp >= 0xd800 && cp <= 0xdfff));
        }
        if (ok) {
            out.append(s.substr(i, len));
            i += len;
        } else {
            append_utf8(out, 0xfffd);
            ++i;
        }
    }
    return out;
}

std::vector<Token> tokenize(std::string_view m) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::string pending_text;

    auto flush_text = [&] {
        if (pending_text.empty()) return;
        Token t;
        t.kind = Token::Kind::text;
        t.text = decode_entities(pending_text);
        tokens.push_back(std::move(t));
        pending_text.clear();
    };

    while (i < m.size()) {
        if (m[i] != '<') {
            pending_text.push_back(m[i++]);
            continue;
        }
        if (m.substr(i, 4) == "<!--") {
            flush_text();
            const auto end = m.find("-->", i + 4);
            Token t;
            t.kind = Token::Kind::comment;
            t.text = std::string(m.substr(i + 4, end == std::string_view::npos ? std::string_view::npos : end - i - 4));
            tokens.push_back(std::move(t));
            i = end == std::string_view::npos ? m.size() : end + 3;
            continue;
        }
        if (i + 1 < m.size() && (m[i + 1] == '!' || m[i + 1] == '?')) {
            flush_text();
            const auto end = m.find('>', i);
            Token t;
            t.kind = Token::Kind::doctype;
            t.text = std::string(m.substr(i + 2, end == std::string_view::npos ? std::string_view::npos : end - i - 2));
            tokens.push_back(std::move(t));
            i = end == std::string_view::npos ? m.size() : end + 1;
            continue;
        }
        const bool closing = i + 1 < m.size() && m[i + 1] == '/';
        std::size_t j = i + (closing ? 2 : 1);
        if (j >= m.size() || !std::isalpha(static_cast<unsigned char>(m[j]))) {
            pending_text.push_back(m[i++]);
            continue;
        }
        flush_text();
        Token t;
        t.kind = closing ? Token::Kind::end_tag : Token::Kind::start_tag;
        while (j < m.size() && !is_space(m[j]) && m[j] != '>' && m[j] != '/') t.name.push_back(lower(m[j++]));

        // Attributes.
        while (j < m.size() && m[j] != '>') {
            if (is_space(m[j])) {
                ++j;
                continue;
            }
            if (m[j] == '/') {
                t.self_closing = true;
                ++j;
                continue;
            }
            std::string key;
            while (j < m.size() && !is_space(m[j]) && m[j] != '=' && m[j] != '>' && m[j] != '/') key.push_back(lower(m[j++]));
            while (j < m.size() && is_space(m[j])) ++j;
            std::string value;
            if (j < m.size() && m[j] == '=') {
                ++j;
                while (j < m.size() && is_space(m[j])) ++j;
                if (j < m.size() && (m[j] == '"' || m[j] == '\'')) {
                    const char q = m[j++];
                    const auto end = m.find(q, j);
                    value = std::string(m.substr(j, end == std::string_view::npos ? std::string_view::npos : end - j));
                    j = end == std::string_view::npos ? m.size() : end + 1;
                } else {
                    while (j < m.size() && !is_space(m[j]) && m[j] != '>') value.push_back(m[j++]);
                }
            }
            if (!key.empty()) t.attrs.emplace_back(std::move(key), decode_entities(value));
            else if (j < m.size() && m[j] != '>') ++j;
        }
        i = j < m.size() ? j + 1 : m.size();

        const bool raw = !closing && std::find(kRawText.begin(), kRawText.end(), t.name) != kRawText.end();
        const std::string name = t.name;
        tokens.push_back(std::move(t));
        if (raw && !tokens.back().self_closing) {
            // Everything up to the matching end tag is opaque text.
            const std::string close = "</" + name;
            std::size_t end = i;
            while (true) {
                end = m.find("</", end);
                if (end == std::string_view::npos || to_lower(m.substr(end, close.size())) == close) break;
                end += 2;
            }
            Token body;
            body.kind = Token::Kind::text;
            const auto content = m.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i);
            body.text = (name == "title" || name == "textarea") ? decode_entities(content) : std::string(content);
            if (!body.text.empty()) tokens.push_back(std::move(body));
            i = end == std::string_view::npos ? m.size() : end;
        }
    }
    flush_text();
    return tokens;
}

std::string resolve_url(std::string_view base, std::string_view ref) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
        while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
        return s;
    };
    ref = trim(ref);
    if (ref.empty()) return std::string(base);
    const auto colon = ref.find(':');
    const auto slash = ref.find('/');
    if (colon != std::string_view::npos && (slash == std::string_view::npos || colon < slash)) return std::string(ref);

    const auto scheme_end = base.find("://");
    const std::string_view scheme = scheme_end == std::string_view::npos ? "https" : base.substr(0, scheme_end);
    if (ref.starts_with("//")) return std::string(scheme) + ":" + std::string(ref);

    const std::size_t host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
    auto path_start = base.find('/', host_start);
    if (path_start == std::string_view::npos) path_start = base.size();
    const auto origin = base.substr(0, path_start);
    if (ref.front() == '/') return std::string(origin) + std::string(ref);

    auto path = base.substr(path_start);
    if (auto q = path.find_first_of("?#"); q != std::string_view::npos) path = path.substr(0, q);
    const auto last_slash = path.rfind('/');
    std::string dir = last_slash == std::string_view::npos ? "/" : std::string(path.substr(0, last_slash + 1));
    if (ref.front() == '?' || ref.front() == '#') return std::string(origin) + std::string(path) + std::string(ref);

    // Normalize "./" and "../" segments.
    std::vector<std::string> segments;
    std::string combined = dir + std::string(ref);
    std::size_t pos = 1;
    while (pos <= combined.size()) {
        auto next = combined.find('/', pos);
        if (next == std::string::npos) next = combined.size();
        const auto seg = combined.substr(pos, next - pos);
        if (seg == "..") {
            if (!segments.empty()) segments.pop_back();
            if (next == combined.size()) segments.emplace_back();
        } else if (seg == ".") {
            if (next == combined.size()) segments.emplace_back();
        } else {
            segments.push_back(seg);
        }
        pos = next + 1;
    }
    std::string out(origin);
    for (const auto& s : segments) out += "/" + s;
    if (segments.empty()) out += "/";
    return out;
}

std::string parse_css_color(std::string_view value) {
    std::string v = to_lower(value);
    v.erase(std::remove_if(v.begin(), v.end(), [](char c) { return is_space(c); }), v.end());
    if (auto bang = v.find('!'); bang != std::string::npos) v.resize(bang);
    char buf[8];
    if (v.size() == 7 && v[0] == '#' && std::all_of(v.begin() + 1, v.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); })) {
        return v;
    }
    if (v.size() == 4 && v[0] == '#' && std::all_of(v.begin() + 1, v.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); })) {
        return std::string{'#', v[1], v[1], v[2], v[2], v[3], v[3]};
    }
    if (v.starts_with("rgb(") || v.starts_with("rgba(")) {
        const auto open = v.find('(');
        int r = 0, g = 0, b = 0;
        float a = 1.0f;
        const int n = std::sscanf(v.c_str() + open + 1, "%d,%d,%d,%f", &r, &g, &b, &a);
        if (n < 3 || a <= 0.0f) return {};
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", std::clamp(r, 0, 255), std::clamp(g, 0, 255), std::clamp(b, 0, 255));
        return buf;
    }
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 16> kNamed{{
        {"white", "#ffffff"}, {"black", "#000000"}, {"red", "#ff0000"},    {"green", "#008000"},
        {"blue", "#0000ff"},  {"yellow", "#ffff00"}, {"gray", "#808080"},  {"grey", "#808080"},
        {"silver", "#c0c0c0"}, {"navy", "#000080"}, {"maroon", "#800000"}, {"orange", "#ffa500"},
        {"purple", "#800080"}, {"teal", "#008080"}, {"olive", "#808000"}, {"whitesmoke", "#f5f5f5"},
    }};
    for (auto [name, hex] : kNamed) {
        if (v == name) return std::string(hex);
    }
    return {};
}

std::string style_property(std::string_view style, std::string_view property) {
    std::size_t pos = 0;
    while (pos < style.size()) {
        auto end = style.find(';', pos);
        if (end == std::string_view::npos) end = style.size();
        auto decl = style.substr(pos, end - pos);
        const auto colon = decl.find(':');
        if (colon != std::string_view::npos) {
            auto key = decl.substr(0, colon);
            auto val = decl.substr(colon + 1);
            while (!key.empty() && is_space(key.front())) key.remove_prefix(1);
            while (!key.empty() && is_space(key.back())) key.remove_suffix(1);
            while (!val.empty() && is_space(val.front())) val.remove_prefix(1);
            while (!val.empty() && is_space(val.back())) val.remove_suffix(1);
            if (to_lower(key) == property) return std::string(val);
        }
        pos = end + 1;
    }
    return {};
}

}  // namespace gaius::convert::html
