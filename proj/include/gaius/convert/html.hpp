#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gaius::convert::html {

struct Token {
    enum class Kind { start_tag, end_tag, text, comment, doctype };
    Kind kind = Kind::text;
    std::string name;  // lowercase tag name
    std::vector<std::pair<std::string, std::string>> attrs;
    std::string text;  // decoded text for text tokens
    bool self_closing = false;

    const std::string* attr(std::string_view key) const noexcept;
};

// Tolerant tokenizer: never throws on malformed markup. Contents of raw-text
// elements (script, style, textarea, title) come back as one text token.
std::vector<Token> tokenize(std::string_view markup);

std::string decode_entities(std::string_view text);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view text);

// Resolves `ref` against `base` (scheme://host/path).
std::string resolve_url(std::string_view base, std::string_view ref);

// "#rgb", "#rrggbb", "rgb(r,g,b)" or a basic color keyword to "#rrggbb".
// Empty for "transparent" or anything unrecognized.
std::string parse_css_color(std::string_view value);

// Value of `property` from an inline style attribute, trimmed.
std::string style_property(std::string_view style, std::string_view property);

}  // namespace gaius::convert::html
