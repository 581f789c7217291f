#include "gaius/common/image_probe.hpp"

#include <cstdint>

namespace gaius {

namespace {

std::uint32_t be16(std::string_view b, std::size_t i) {
    return (static_cast<std::uint8_t>(b[i]) << 8) | static_cast<std::uint8_t>(b[i + 1]);
}
std::uint32_t be32(std::string_view b, std::size_t i) { return (be16(b, i) << 16) | be16(b, i + 2); }
std::uint32_t le16(std::string_view b, std::size_t i) {
    return static_cast<std::uint8_t>(b[i]) | (static_cast<std::uint8_t>(b[i + 1]) << 8);
}

std::optional<ImageInfo> probe_jpeg(std::string_view b) {
    std::size_t i = 2;
    while (i + 9 < b.size()) {
        if (static_cast<std::uint8_t>(b[i]) != 0xff) return std::nullopt;
        const auto marker = static_cast<std::uint8_t>(b[i + 1]);
        if (marker == 0xff) {
            ++i;
            continue;
        }
        if (marker == 0xd8 || (marker >= 0xd0 && marker <= 0xd7) || marker == 0x01) {
            i += 2;
            continue;
        }
        const std::uint32_t len = be16(b, i + 2);
        const bool sof = marker >= 0xc0 && marker <= 0xcf && marker != 0xc4 && marker != 0xc8 && marker != 0xcc;
        if (sof) {
            return ImageInfo{ImageFormat::jpeg, static_cast<int>(be16(b, i + 7)), static_cast<int>(be16(b, i + 5))};
        }
        i += 2 + len;
    }
    return std::nullopt;
}

}  // namespace

std::optional<ImageInfo> probe_image(std::string_view b) noexcept {
    if (b.size() >= 24 && b.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8)) {
        return ImageInfo{ImageFormat::png, static_cast<int>(be32(b, 16)), static_cast<int>(be32(b, 20))};
    }
    if (b.size() >= 4 && static_cast<std::uint8_t>(b[0]) == 0xff && static_cast<std::uint8_t>(b[1]) == 0xd8) {
        return probe_jpeg(b);
    }
    if (b.size() >= 10 && (b.substr(0, 6) == "GIF87a" || b.substr(0, 6) == "GIF89a")) {
        return ImageInfo{ImageFormat::gif, static_cast<int>(le16(b, 6)), static_cast<int>(le16(b, 8))};
    }
    if (b.size() >= 30 && b.substr(0, 4) == "RIFF" && b.substr(8, 4) == "WEBP" && b.substr(12, 4) == "VP8X") {
        const auto w = 1 + (static_cast<std::uint8_t>(b[24]) | (static_cast<std::uint8_t>(b[25]) << 8) |
                            (static_cast<std::uint8_t>(b[26]) << 16));
        const auto h = 1 + (static_cast<std::uint8_t>(b[27]) | (static_cast<std::uint8_t>(b[28]) << 8) |
                            (static_cast<std::uint8_t>(b[29]) << 16));
        return ImageInfo{ImageFormat::webp, static_cast<int>(w), static_cast<int>(h)};
    }
    return std::nullopt;
}

}  // namespace gaius
