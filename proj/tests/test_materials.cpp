// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <fstream>
#include <random>

#include "relit/error.hpp"
#include "relit/imgio.hpp"
#include "relit/materials.hpp"
#include "test_util.hpp"

using namespace relit;
using testutil::ScopedTempDir;

namespace {

MaterialMap random_map(std::mt19937& rng, int w, int h, int labels) {
    std::uniform_int_distribution<int> dist(0, labels - 1);
    MaterialMap map(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) map.set_label(x, y, static_cast<std::uint8_t>(dist(rng)));
    return map;
}

void save_label_png(const MaterialMap& map, const std::filesystem::path& path) {
    RawImage raw;
    raw.width = map.width();
    raw.height = map.height();
    raw.channels = 1;
    raw.pixels = map.labels();
    save_image_raw(raw, path);
}

}  // namespace

TEST_CASE("default palette has nine dense ids with distinct colors") {
    const MaterialPalette p = default_palette();
    REQUIRE(p.size() == 9);
    for (int i = 0; i < 9; ++i) CHECK(p.entries[i].id == i);
    for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j)
            CHECK((p.entries[i].red != p.entries[j].red ||
                   p.entries[i].green != p.entries[j].green ||
                   p.entries[i].blue != p.entries[j].blue));
}

TEST_CASE("palette file parsing handles comments and rejects malformed input") {
    ScopedTempDir tmp("palette");
    {
        std::ofstream out(tmp.file("ok.txt"));
        out << "# comment line\n"
            << "0 sky 135 206 235\n"
            << "1 grass 34 139 34  # trailing comment\n"
            << "\n"
            << "2 stone 128 128 128\n";
    }
    const MaterialPalette p = load_palette(tmp.file("ok.txt"));
    REQUIRE(p.size() == 3);
    CHECK(p.entries[1].name == "grass");
    CHECK(p.entries[2].red == 128);

    {
        std::ofstream out(tmp.file("gap.txt"));
        out << "0 sky 1 2 3\n2 stone 4 5 6\n";
    }
    CHECK_THROWS_AS(load_palette(tmp.file("gap.txt")), MaterialError);

    {
        std::ofstream out(tmp.file("range.txt"));
        out << "0 sky 300 0 0\n";
    }
    CHECK_THROWS_AS(load_palette(tmp.file("range.txt")), MaterialError);

    CHECK_THROWS_AS(load_palette(tmp.file("missing.txt")), IoError);
}

TEST_CASE("single-channel maps carry raw labels") {
    ScopedTempDir tmp("materials");
    const MaterialPalette palette = default_palette();
    save_label_png(MaterialMap(6, 4, 0), tmp.file("zeros.png"));
    const MaterialMap map = load_material_map(tmp.file("zeros.png"), palette);
    for (auto l : map.labels()) CHECK(l == 0);
}

TEST_CASE("out-of-range gray label names the pixel") {
    ScopedTempDir tmp("materials");
    MaterialMap bad(3, 2, 0);
    bad.set_label(2, 1, 9);  // default palette has labels 0..8
    save_label_png(bad, tmp.file("bad.png"));
    CHECK_THROWS_WITH_AS(load_material_map(tmp.file("bad.png"), default_palette()),
                         doctest::Contains("(2,1)"), MaterialError);
}

TEST_CASE("rgb maps use exact palette lookup") {
    ScopedTempDir tmp("materials");
    const MaterialPalette palette = default_palette();
    const MaterialMap solid(5, 5, 3);
    save_image(recolor(solid, palette), tmp.file("solid.png"));
    const MaterialMap map = load_material_map(tmp.file("solid.png"), palette);
    for (auto l : map.labels()) CHECK(l == 3);
}

TEST_CASE("unknown color names the color and pixel") {
    ScopedTempDir tmp("materials");
    RawImage raw;
    raw.width = 2;
    raw.height = 1;
    raw.channels = 3;
    const auto& e = default_palette().entries[0];
    raw.pixels = {e.red, e.green, e.blue, 7, 8, 9};
    save_image_raw(raw, tmp.file("odd.png"));
    CHECK_THROWS_WITH_AS(load_material_map(tmp.file("odd.png"), default_palette()),
                         doctest::Contains("(7,8,9)"), MaterialError);
}

TEST_CASE("recolor paints flat regions with hard boundaries") {
    const MaterialPalette palette = default_palette();
    MaterialMap map(4, 1, 0);
    map.set_label(2, 0, 1);
    map.set_label(3, 0, 1);
    const ImageRgb img = recolor(map, palette);
    CHECK(img.r.at(0, 0) == doctest::Approx(palette.entries[0].red / 255.0));
    CHECK(img.r.at(1, 0) == img.r.at(0, 0));
    CHECK(img.r.at(2, 0) == doctest::Approx(palette.entries[1].red / 255.0));
    CHECK(img.r.at(2, 0) == img.r.at(3, 0));
}

TEST_CASE("recolor and load_material_map are mutually inverse") {
    ScopedTempDir tmp("materials");
    std::mt19937 rng(31);
    const MaterialPalette palette = default_palette();
    for (int trial = 0; trial < 20; ++trial) {
        const MaterialMap map = random_map(rng, 9, 7, palette.size());
        save_image(recolor(map, palette), tmp.file("rt.png"));
        const MaterialMap back = load_material_map(tmp.file("rt.png"), palette);
        CHECK(back == map);
    }
}

TEST_CASE("material gray term values") {
    MaterialPalette palette;
    palette.entries = {{0, "white", 255, 255, 255}, {1, "black", 0, 0, 0}};
    MaterialMap map(2, 1, 0);
    map.set_label(1, 0, 1);
    const ImagePlane term = material_gray_term(map, palette);
    CHECK(term.at(0, 0) == doctest::Approx(254.9745 / 255.0).epsilon(1e-9));
    CHECK(term.at(0, 0) < 1.0);
    CHECK(term.at(1, 0) == 0.0);
}

TEST_CASE("material gray term is piecewise constant and within [0,1)") {
    std::mt19937 rng(32);
    const MaterialPalette palette = default_palette();
    const MaterialMap map = random_map(rng, 16, 16, palette.size());
    const ImagePlane term = material_gray_term(map, palette);
    std::vector<double> seen(palette.size(), -1.0);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            const double v = term.at(x, y);
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
            double& first = seen[map.label(x, y)];
            if (first < 0.0)
                first = v;
            else
                CHECK(v == first);  // constant within a label class
        }
    }
}
