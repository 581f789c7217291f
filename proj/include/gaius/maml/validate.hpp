#pragma once

#include "gaius/maml/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gaius::maml {

// Rule ids reported by validate().
namespace rule {
inline constexpr std::string_view kPositiveExtent = "positive-extent";
inline constexpr std::string_view kNonNegativePosition = "non-negative-position";
inline constexpr std::string_view kFinitePosition = "finite-position";
inline constexpr std::string_view kColorFormat = "color-format";
inline constexpr std::string_view kNonEmptyUrl = "non-empty-url";
inline constexpr std::string_view kNonEmptyHref = "non-empty-href";
inline constexpr std::string_view kFlatReference = "flat-reference";
inline constexpr std::string_view kPositiveFont = "positive-font";
inline constexpr std::string_view kNonEmptyName = "non-empty-name";
inline constexpr std::string_view kLanguageTag = "language-tag";
inline constexpr std::string_view kLatitudeRange = "latitude-range";
inline constexpr std::string_view kLongitudeRange = "longitude-range";
inline constexpr std::string_view kCanvasWidth = "canvas-width";
inline constexpr std::string_view kExtentLimit = "extent-limit";
inline constexpr std::string_view kUtf8 = "utf8";
}  // namespace rule

struct Violation {
    long object_index = -1;  // -1 for page-level rules
    std::string field;
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate(const Page& page);

// Exactly "#" followed by six lowercase hex digits.
bool is_normalized_color(std::string_view color) noexcept;

// Lowercases a color when it is "#" + six hex digits in any case; otherwise
// returns the input unchanged so validate() can flag it.
std::string normalize_color(std::string_view color);

bool is_language_tag(std::string_view tag) noexcept;

// Largest coordinate/extent accepted, keeps every y + h exactly representable.
inline constexpr double kMaxCoordinate = 1.0e9;

}  // namespace gaius::maml
