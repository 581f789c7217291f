#pragma once

#include "gaius/maml/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::maml {

enum class ParseErrc {
    syntax,              // malformed JSON or wrong JSON value type
    unknown_object_type, // tag outside the six variants
    missing_field,       // required attribute absent
    unknown_field,       // extra attribute in strict mode
    range,               // invariant violation
};

std::string_view parse_errc_name(ParseErrc code) noexcept;

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrc code, std::size_t byte_offset, long object_index, const std::string& detail);

    ParseErrc code() const noexcept { return code_; }
    std::size_t byte_offset() const noexcept { return byte_offset_; }
    // -1 when the error is not attributable to one object.
    long object_index() const noexcept { return object_index_; }

private:
    ParseErrc code_;
    std::size_t byte_offset_;
    long object_index_;
};

struct ParseOptions {
    // Reject unknown keys on page meta and on objects. When false they are
    // dropped and a note is recorded.
    bool strict = true;
    // Throw ParseErrc::range on the first invariant violation. Callers that
    // want the full violation list (publishing) turn this off and call
    // validate() themselves.
    bool enforce_invariants = true;
};

struct ParseResult {
    Page page;
    std::vector<std::string> notes;  // normalizations applied while parsing
};

ParseResult parse_page_with_notes(std::string_view text, const ParseOptions& opts = {});
Page parse_page(std::string_view text, const ParseOptions& opts = {});

// Throws Error(invariant_violation) when validate() reports anything.
std::string serialize_page(const Page& page);

// Single object in wire form, e.g. {"type":"rect","x":0,...}.
std::string serialize_object(const Object& obj);

}  // namespace gaius::maml
