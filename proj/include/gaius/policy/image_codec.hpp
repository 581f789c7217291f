#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::policy {

// 8-bit RGB, rows top to bottom.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width * height * 3
};

// Decodes JPEG or PNG. Transparent PNG pixels are composited onto white.
// Throws Error(unsupported_image_format) for other or corrupt input.
RgbImage decode_image(std::string_view bytes);

// Area-averaging resize. Throws Error(zero_dimension) for a target <= 0.
RgbImage resize(const RgbImage& src, int width, int height);

std::string encode_jpeg(const RgbImage& img, int quality);

}  // namespace gaius::policy
