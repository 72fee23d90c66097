// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "relit/materials.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include "relit/error.hpp"
#include "relit/imgio.hpp"

namespace relit {

MaterialPalette default_palette() {
    return MaterialPalette{{
        {0, "sky", 135, 206, 235},
        {1, "foliage", 34, 139, 34},
        {2, "water", 30, 144, 255},
        {3, "stone", 128, 128, 128},
        {4, "brick", 178, 34, 34},
        {5, "wood", 139, 90, 43},
        {6, "metal", 192, 192, 192},
        {7, "glass", 220, 240, 250},
        {8, "pavement", 105, 105, 105},
    }};
}

MaterialPalette load_palette(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open palette file: " + path.string());

    MaterialPalette palette;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        MaterialPalette::Entry entry;
        int r, g, b;
        if (!(fields >> entry.id)) continue;  // blank or comment-only line
        if (!(fields >> entry.name >> r >> g >> b))
            throw MaterialError("malformed palette entry at " + path.string() + ":" +
                                std::to_string(line_no));
        if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
            throw MaterialError("palette color out of range at " + path.string() + ":" +
                                std::to_string(line_no));
        entry.red = static_cast<std::uint8_t>(r);
        entry.green = static_cast<std::uint8_t>(g);
        entry.blue = static_cast<std::uint8_t>(b);
        palette.entries.push_back(std::move(entry));
    }
    if (palette.entries.empty())
        throw MaterialError("palette file has no entries: " + path.string());

    std::sort(palette.entries.begin(), palette.entries.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (int i = 0; i < palette.size(); ++i)
        if (palette.entries[i].id != i)
            throw MaterialError("palette ids must be 0.." +
                                std::to_string(palette.size() - 1) +
                                " with no gaps: " + path.string());
    return palette;
}

MaterialMap load_material_map(const std::filesystem::path& path,
                              const MaterialPalette& palette) {
    const RawImage raw = load_image_raw(path);
    MaterialMap map(raw.width, raw.height);

    if (raw.channels == 1) {
        for (int y = 0; y < raw.height; ++y) {
            for (int x = 0; x < raw.width; ++x) {
                const std::uint8_t label = raw.pixels[static_cast<std::size_t>(y) * raw.width + x];
                if (label >= palette.size())
                    throw MaterialError("label " + std::to_string(label) + " at pixel (" +
                                        std::to_string(x) + "," + std::to_string(y) +
                                        ") exceeds palette size " +
                                        std::to_string(palette.size()));
                map.set_label(x, y, label);
            }
        }
        return map;
    }

    std::map<std::array<std::uint8_t, 3>, std::uint8_t> color_to_label;
    for (const auto& e : palette.entries)
        color_to_label[{e.red, e.green, e.blue}] = static_cast<std::uint8_t>(e.id);

    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * raw.width + x) * 3;
            const std::array<std::uint8_t, 3> color{raw.pixels[i], raw.pixels[i + 1],
                                                    raw.pixels[i + 2]};
            const auto it = color_to_label.find(color);
            if (it == color_to_label.end())
                throw MaterialError("color (" + std::to_string(color[0]) + "," +
                                    std::to_string(color[1]) + "," +
                                    std::to_string(color[2]) + ") at pixel (" +
                                    std::to_string(x) + "," + std::to_string(y) +
                                    ") is not in the palette");
            map.set_label(x, y, it->second);
        }
    }
    return map;
}

ImageRgb recolor(const MaterialMap& map, const MaterialPalette& palette) {
    ImageRgb out(map.width(), map.height());
    const auto& labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& e = palette.entries.at(labels[i]);
        out.r[i] = e.red / 255.0;
        out.g[i] = e.green / 255.0;
        out.b[i] = e.blue / 255.0;
    }
    return out;
}

ImagePlane material_gray_term(const MaterialMap& map, const MaterialPalette& palette) {
    std::vector<double> per_label(palette.entries.size());
    for (const auto& e : palette.entries)
        per_label[e.id] = gray(e.red, e.green, e.blue) / 255.0;

    ImagePlane out(map.width(), map.height());
    const auto& labels = map.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = per_label.at(labels[i]);
    return out;
}

}  // namespace relit
