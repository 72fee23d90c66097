// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace relit {

struct PixelCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(PixelCoord, PixelCoord) = default;
};

struct Offset {
    int dx = 0;
    int dy = 0;

    friend bool operator==(Offset, Offset) = default;
};

/// Single-channel raster of finite doubles, row-major. Loaded images live in
/// [0,1]; derived planes (detail layers, lambda maps) may exceed 1.
class ImagePlane {
public:
    ImagePlane() = default;
    ImagePlane(int width, int height, double value = 0.0)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value) {
        assert(width >= 0 && height >= 0);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept { return data_.size(); }

    double at(int x, int y) const {
        assert(in_bounds(x, y));
        return data_[index(x, y)];
    }
    double& at(int x, int y) {
        assert(in_bounds(x, y));
        return data_[index(x, y)];
    }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Three planes of identical dimensions.
struct ImageRgb {
    ImagePlane r, g, b;

    ImageRgb() = default;
    ImageRgb(int width, int height, double value = 0.0)
        : r(width, height, value), g(width, height, value), b(width, height, value) {}

    int width() const noexcept { return r.width(); }
    int height() const noexcept { return r.height(); }

    ImagePlane& channel(int c) {
        assert(c >= 0 && c < 3);
        return c == 0 ? r : (c == 1 ? g : b);
    }
    const ImagePlane& channel(int c) const {
        assert(c >= 0 && c < 3);
        return c == 0 ? r : (c == 1 ? g : b);
    }

    friend bool operator==(const ImageRgb&, const ImageRgb&) = default;
};

/// Luma on the 0-255 scale: R*0.2989 + G*0.587 + B*0.114.
double gray(double r, double g, double b);

/// Per-pixel luma of a [0,1] image, still in [0,1] (the weights sum to 0.9999).
ImagePlane luminance(const ImageRgb& img);

/// Forward difference l(x+1,y) - l(x,y); zero in the last column.
ImagePlane forward_diff_x(const ImagePlane& plane);

/// Forward difference l(x,y+1) - l(x,y); zero in the last row.
ImagePlane forward_diff_y(const ImagePlane& plane);

/// sqrt(dx^2 + dy^2) of the forward differences.
ImagePlane gradient_magnitude(const ImagePlane& plane);

}  // namespace relit
