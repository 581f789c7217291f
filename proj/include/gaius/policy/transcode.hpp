#pragma once

#include "gaius/policy/fidelity.hpp"
#include "gaius/policy/variants.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace gaius::policy {

struct TranscodedImage {
    MediaVariant variant;
    std::string bytes;  // JPEG
};

// round(original * scale), half away from zero, never below 1.
std::int64_t scaled_dimension(std::int64_t original, double scale) noexcept;

// Resizes to the fidelity's image_scale and re-encodes as JPEG at its
// image_quality. Throws Error(unsupported_image_format) or Error(zero_dimension).
TranscodedImage transcode_image(std::string_view original, Fidelity fidelity, const FidelityProfile& profile,
                                std::string_view media_id);

// All three fidelities of one image, registered into a variant set.
struct TranscodedSet {
    MediaVariantSet set;
    std::array<std::string, 3> bytes;  // indexed by Fidelity
};
TranscodedSet transcode_all(std::string_view original, const FidelityProfile& profile, std::string_view media_id);

}  // namespace gaius::policy
