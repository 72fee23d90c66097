// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "relit/imgio.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "relit/error.hpp"

namespace relit {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    (void)png;
    throw IoError(std::string("libpng: ") + msg);
}

void png_warn_fn(png_structp, png_const_charp) {}

std::uint8_t quantize(double v) {
    if (v <= 0.0) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

RawImage load_image_raw(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) throw IoError("cannot open image file: " + path.string());

    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw IoError("not a PNG file: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             png_error_fn, png_warn_fn);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }

    RawImage raw;
    try {
        png_init_io(png, file.get());
        png_set_sig_bytes(png, 8);
        png_read_info(png, info);

        const int bit_depth = png_get_bit_depth(png, info);
        const int color_type = png_get_color_type(png, info);
        if (bit_depth > 8)
            throw IoError("unsupported bit depth " + std::to_string(bit_depth) +
                          " (8-bit required): " + path.string());

        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        if ((color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
            png_get_valid(png, info, PNG_INFO_tRNS) != 0) {
            raw.alpha_dropped = true;
            if (png_get_valid(png, info, PNG_INFO_tRNS) != 0) png_set_tRNS_to_alpha(png);
            png_set_strip_alpha(png);
        }
        png_set_interlace_handling(png);
        png_read_update_info(png, info);

        raw.width = static_cast<int>(png_get_image_width(png, info));
        raw.height = static_cast<int>(png_get_image_height(png, info));
        raw.channels = png_get_channels(png, info);
        if (raw.channels != 1 && raw.channels != 3)
            throw IoError("unsupported channel count " + std::to_string(raw.channels) +
                          ": " + path.string());

        const std::size_t stride = static_cast<std::size_t>(raw.width) * raw.channels;
        raw.pixels.resize(stride * raw.height);
        std::vector<png_bytep> rows(raw.height);
        for (int y = 0; y < raw.height; ++y) rows[y] = raw.pixels.data() + y * stride;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);

    if (raw.alpha_dropped)
        std::fprintf(stderr, "warning: %s: alpha channel dropped\n", path.string().c_str());
    return raw;
}

LoadedImage load_image(const std::filesystem::path& path) {
    RawImage raw = load_image_raw(path);
    LoadedImage loaded;
    loaded.source_channels = raw.channels;
    loaded.alpha_dropped = raw.alpha_dropped;
    loaded.image = ImageRgb(raw.width, raw.height);
    const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
    for (std::size_t i = 0; i < n; ++i) {
        if (raw.channels == 1) {
            const double v = raw.pixels[i] / 255.0;
            loaded.image.r[i] = v;
            loaded.image.g[i] = v;
            loaded.image.b[i] = v;
        } else {
            loaded.image.r[i] = raw.pixels[3 * i + 0] / 255.0;
            loaded.image.g[i] = raw.pixels[3 * i + 1] / 255.0;
            loaded.image.b[i] = raw.pixels[3 * i + 2] / 255.0;
        }
    }
    return loaded;
}

void save_image_raw(const RawImage& raw, const std::filesystem::path& path) {
    if (raw.channels != 1 && raw.channels != 3)
        throw IoError("save_image_raw: channels must be 1 or 3");
    if (raw.pixels.size() !=
        static_cast<std::size_t>(raw.width) * raw.height * raw.channels)
        throw IoError("save_image_raw: pixel buffer size mismatch");

    // Write to a sibling temp file and rename, so a failure never leaves a
    // partial output at the requested path.
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        FilePtr file(std::fopen(tmp.string().c_str(), "wb"));
        if (!file) throw IoError("cannot open output file for writing: " + path.string());

        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                                  png_error_fn, png_warn_fn);
        if (!png) throw IoError("png_create_write_struct failed");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw IoError("png_create_info_struct failed");
        }
        try {
            png_init_io(png, file.get());
            png_set_IHDR(png, info, raw.width, raw.height, 8,
                         raw.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                         PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                         PNG_FILTER_TYPE_DEFAULT);
            png_write_info(png, info);
            const std::size_t stride = static_cast<std::size_t>(raw.width) * raw.channels;
            for (int y = 0; y < raw.height; ++y)
                png_write_row(png, const_cast<png_bytep>(raw.pixels.data() + y * stride));
            png_write_end(png, info);
        } catch (...) {
            png_destroy_write_struct(&png, &info);
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw;
        }
        png_destroy_write_struct(&png, &info);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot write output file: " + path.string());
    }
}

void save_image(const ImageRgb& img, const std::filesystem::path& path) {
    RawImage raw;
    raw.width = img.width();
    raw.height = img.height();
    raw.channels = 3;
    const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
    raw.pixels.resize(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        raw.pixels[3 * i + 0] = quantize(img.r[i]);
        raw.pixels[3 * i + 1] = quantize(img.g[i]);
        raw.pixels[3 * i + 2] = quantize(img.b[i]);
    }
    save_image_raw(raw, path);
}

void save_image(const ImagePlane& plane, const std::filesystem::path& path) {
    RawImage raw;
    raw.width = plane.width();
    raw.height = plane.height();
    raw.channels = 1;
    raw.pixels.resize(plane.pixel_count());
    for (std::size_t i = 0; i < plane.pixel_count(); ++i) raw.pixels[i] = quantize(plane[i]);
    save_image_raw(raw, path);
}

}  // namespace relit
