#pragma once

#include <optional>
#include <string_view>

namespace gaius {

enum class ImageFormat { jpeg, png, gif, webp };

struct ImageInfo {
    ImageFormat format;
    int width;
    int height;
};

// Reads dimensions from the container header without decoding pixels.
std::optional<ImageInfo> probe_image(std::string_view bytes) noexcept;

}  // namespace gaius
