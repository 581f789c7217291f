#pragma once

#include "gaius/policy/fidelity.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gaius::policy {

struct MediaVariant {
    std::string url;
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::uint64_t byte_size = 0;
    std::string mime;

    friend bool operator==(const MediaVariant&, const MediaVariant&) = default;
};

// Stored media are addressed as /v1/media/{id}. For a video, the high and
// medium entries are the video itself and the low entry is its poster image.
struct MediaVariantSet {
    std::string media_id;
    bool video = false;
    std::array<std::optional<MediaVariant>, 3> variants;

    const std::optional<MediaVariant>& at(Fidelity f) const noexcept { return variants[static_cast<std::size_t>(f)]; }
    std::optional<MediaVariant>& at(Fidelity f) noexcept { return variants[static_cast<std::size_t>(f)]; }

    // Byte sizes are non-decreasing with fidelity over the present entries.
    bool ordered() const noexcept;

    friend bool operator==(const MediaVariantSet&, const MediaVariantSet&) = default;
};

inline constexpr std::string_view kMediaPrefix = "/v1/media/";

// The high variant keeps the bare media url so a page assembled at high
// fidelity references exactly what was published.
std::string variant_url(std::string_view media_id, Fidelity f);

// Media id of a store url ("/v1/media/{id}" with or without a query), or
// nullopt for any other url.
std::optional<std::string> media_id_of(std::string_view url);

}  // namespace gaius::policy
