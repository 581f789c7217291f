#include "gaius/policy/image_codec.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/image_probe.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <csetjmp>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

namespace gaius::policy {

namespace {

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void on_jpeg_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void silence(j_common_ptr) {}

RgbImage decode_jpeg(std::string_view bytes) {
    jpeg_decompress_struct cinfo{};
    JpegError err{};
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = on_jpeg_error;
    err.mgr.output_message = silence;
    RgbImage img;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw Error(Errc::unsupported_image_format, std::string("corrupt JPEG: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    img.width = static_cast<int>(cinfo.output_width);
    img.height = static_cast<int>(cinfo.output_height);
    img.pixels.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * static_cast<std::size_t>(img.width) * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

RgbImage decode_png(std::string_view bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(Errc::unsupported_image_format, std::string("corrupt PNG: ") + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    RgbImage img;
    img.width = static_cast<int>(image.width);
    img.height = static_cast<int>(image.height);
    img.pixels.resize(PNG_IMAGE_SIZE(image));
    png_color white{255, 255, 255};
    if (!png_image_finish_read(&image, &white, img.pixels.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw Error(Errc::unsupported_image_format, "corrupt PNG: " + msg);
    }
    return img;
}

// Resamples `count` lines of `src_len` samples (3 channels each) to `dst_len`
// samples by box coverage. `step` is the distance between samples of one line
// and `line_step` the distance between lines, both in bytes.
void resample(const std::uint8_t* src, std::size_t src_len, std::size_t src_step, std::size_t src_line_step,
              std::uint8_t* dst, std::size_t dst_len, std::size_t dst_step, std::size_t dst_line_step, std::size_t count) {
    const double ratio = static_cast<double>(src_len) / static_cast<double>(dst_len);
    for (std::size_t line = 0; line < count; ++line) {
        const std::uint8_t* s = src + line * src_line_step;
        std::uint8_t* d = dst + line * dst_line_step;
        for (std::size_t i = 0; i < dst_len; ++i) {
            const double lo = static_cast<double>(i) * ratio;
            const double hi = static_cast<double>(i + 1) * ratio;
            double acc[3] = {0, 0, 0};
            double total = 0;
            for (auto k = static_cast<std::size_t>(lo); k < src_len && static_cast<double>(k) < hi; ++k) {
                const double w = std::min(hi, static_cast<double>(k + 1)) - std::max(lo, static_cast<double>(k));
                if (w <= 0) continue;
                for (int c = 0; c < 3; ++c) acc[c] += w * s[k * src_step + static_cast<std::size_t>(c)];
                total += w;
            }
            for (int c = 0; c < 3; ++c) {
                d[i * dst_step + static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(acc[c] / total + 0.5);
            }
        }
    }
}

}  // namespace

RgbImage decode_image(std::string_view bytes) {
    const auto info = probe_image(bytes);
    RgbImage img;
    if (info && info->format == ImageFormat::jpeg) {
        img = decode_jpeg(bytes);
    } else if (info && info->format == ImageFormat::png) {
        img = decode_png(bytes);
    } else {
        throw Error(Errc::unsupported_image_format, "only JPEG and PNG can be transcoded");
    }
    if (img.width <= 0 || img.height <= 0) throw Error(Errc::zero_dimension, "image has a zero dimension");
    return img;
}

RgbImage resize(const RgbImage& src, int width, int height) {
    if (width <= 0 || height <= 0 || src.width <= 0 || src.height <= 0) {
        throw Error(Errc::zero_dimension, "cannot resize to or from a zero dimension");
    }
    if (width == src.width && height == src.height) return src;
    const auto sw = static_cast<std::size_t>(src.width), sh = static_cast<std::size_t>(src.height);
    const auto dw = static_cast<std::size_t>(width), dh = static_cast<std::size_t>(height);
    std::vector<std::uint8_t> rows(dw * sh * 3);
    resample(src.pixels.data(), sw, 3, sw * 3, rows.data(), dw, 3, dw * 3, sh);
    RgbImage out;
    out.width = width;
    out.height = height;
    out.pixels.resize(dw * dh * 3);
    resample(rows.data(), sh, dw * 3, 3, out.pixels.data(), dh, dw * 3, 3, dw);
    return out;
}

std::string encode_jpeg(const RgbImage& img, int quality) {
    if (img.width <= 0 || img.height <= 0) throw Error(Errc::zero_dimension, "cannot encode an empty image");
    jpeg_compress_struct cinfo{};
    JpegError err{};
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = on_jpeg_error;
    err.mgr.output_message = silence;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw Error(Errc::io_error, std::string("JPEG encoding failed: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    cinfo.optimize_coding = TRUE;
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        auto* row = const_cast<JSAMPROW>(img.pixels.data() +
                                         static_cast<std::size_t>(cinfo.next_scanline) * static_cast<std::size_t>(img.width) * 3);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::string out(reinterpret_cast<const char*>(buffer), size);
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    return out;
}

}  // namespace gaius::policy
