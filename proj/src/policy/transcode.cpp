#include "gaius/policy/transcode.hpp"

#include "gaius/common/error.hpp"
#include "gaius/policy/image_codec.hpp"

#include <algorithm>
#include <cmath>

namespace gaius::policy {

std::int64_t scaled_dimension(std::int64_t original, double scale) noexcept {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(static_cast<double>(original) * scale + 0.5)));
}

namespace {

TranscodedImage encode_level(const RgbImage& src, Fidelity fidelity, const FidelityProfile& profile,
                             std::string_view media_id) {
    const auto& level = profile.at(fidelity);
    const auto w = scaled_dimension(src.width, level.image_scale);
    const auto h = scaled_dimension(src.height, level.image_scale);
    TranscodedImage out;
    out.bytes = encode_jpeg(resize(src, static_cast<int>(w), static_cast<int>(h)), level.image_quality);
    out.variant = MediaVariant{variant_url(media_id, fidelity), w, h, out.bytes.size(), "image/jpeg"};
    return out;
}

}  // namespace

TranscodedImage transcode_image(std::string_view original, Fidelity fidelity, const FidelityProfile& profile,
                                std::string_view media_id) {
    return encode_level(decode_image(original), fidelity, profile, media_id);
}

TranscodedSet transcode_all(std::string_view original, const FidelityProfile& profile, std::string_view media_id) {
    const auto src = decode_image(original);
    TranscodedSet out;
    out.set.media_id = std::string(media_id);
    for (auto f : kAllFidelities) {
        auto t = encode_level(src, f, profile, media_id);
        out.set.at(f) = std::move(t.variant);
        out.bytes[static_cast<std::size_t>(f)] = std::move(t.bytes);
    }
    return out;
}

}  // namespace gaius::policy
