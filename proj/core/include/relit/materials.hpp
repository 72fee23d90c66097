// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "relit/image.hpp"

namespace relit {

/// Display palette for material labels. Ids are dense: 0..size()-1.
struct MaterialPalette {
    struct Entry {
        int id = 0;
        std::string name;
        std::uint8_t red = 0, green = 0, blue = 0;
    };
    std::vector<Entry> entries;

    int size() const noexcept { return static_cast<int>(entries.size()); }
};

/// Nine outdoor material categories with distinct display colors.
MaterialPalette default_palette();

/// Plain text palette: one `id name R G B` entry per line, `#` comments.
MaterialPalette load_palette(const std::filesystem::path& path);

/// Per-pixel material labels, same grid as the image it annotates.
class MaterialMap {
public:
    MaterialMap() = default;
    MaterialMap(int width, int height, std::uint8_t label = 0)
        : width_(width), height_(height),
          labels_(static_cast<std::size_t>(width) * height, label) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    std::uint8_t label(int x, int y) const { return labels_[index(x, y)]; }
    void set_label(int x, int y, std::uint8_t label) { labels_[index(x, y)] = label; }

    const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
    std::vector<std::uint8_t>& labels() noexcept { return labels_; }

    friend bool operator==(const MaterialMap&, const MaterialMap&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

/// Reads a label map. Single-channel files carry raw label values; RGB files
/// are mapped color -> label by exact palette lookup and fail loudly on any
/// color not in the palette.
MaterialMap load_material_map(const std::filesystem::path& path,
                              const MaterialPalette& palette);

/// Paints every pixel with its label's display color, scaled to [0,1].
ImageRgb recolor(const MaterialMap& map, const MaterialPalette& palette);

/// Per-pixel gray(display color)/255, in [0,1). The material term of the
/// smoothness weight.
ImagePlane material_gray_term(const MaterialMap& map, const MaterialPalette& palette);

}  // namespace relit
