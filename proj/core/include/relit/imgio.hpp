// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "relit/image.hpp"

namespace relit {

/// 8-bit pixels as stored in the file, interleaved row-major.
/// Alpha is dropped on load (alpha_dropped records that it happened).
struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 (gray) or 3 (rgb)
    bool alpha_dropped = false;
    std::vector<std::uint8_t> pixels;
};

struct LoadedImage {
    ImageRgb image;  // values in [0,1]; grayscale expands to three equal channels
    int source_bit_depth = 8;
    int source_channels = 0;
    bool alpha_dropped = false;
};

RawImage load_image_raw(const std::filesystem::path& path);

LoadedImage load_image(const std::filesystem::path& path);

/// 8-bit PNG, values quantized with round(v*255) (half away from zero).
/// The output path is never left behind on failure.
void save_image(const ImageRgb& img, const std::filesystem::path& path);

/// Grayscale variant of the above.
void save_image(const ImagePlane& plane, const std::filesystem::path& path);

void save_image_raw(const RawImage& raw, const std::filesystem::path& path);

}  // namespace relit
