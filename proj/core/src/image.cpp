// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "relit/image.hpp"

#include <cmath>

namespace relit {

double gray(double r, double g, double b) {
    return r * 0.2989 + g * 0.587 + b * 0.114;
}

ImagePlane luminance(const ImageRgb& img) {
    ImagePlane out(img.width(), img.height());
    const std::size_t n = out.pixel_count();
    for (std::size_t i = 0; i < n; ++i)
        out[i] = gray(img.r[i], img.g[i], img.b[i]);
    return out;
}

ImagePlane forward_diff_x(const ImagePlane& plane) {
    const int w = plane.width(), h = plane.height();
    ImagePlane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x + 1 < w; ++x)
            out.at(x, y) = plane.at(x + 1, y) - plane.at(x, y);
    return out;
}

ImagePlane forward_diff_y(const ImagePlane& plane) {
    const int w = plane.width(), h = plane.height();
    ImagePlane out(w, h);
    for (int y = 0; y + 1 < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = plane.at(x, y + 1) - plane.at(x, y);
    return out;
}

ImagePlane gradient_magnitude(const ImagePlane& plane) {
    const int w = plane.width(), h = plane.height();
    ImagePlane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x + 1 < w ? plane.at(x + 1, y) - plane.at(x, y) : 0.0;
            const double dy = y + 1 < h ? plane.at(x, y + 1) - plane.at(x, y) : 0.0;
            out.at(x, y) = std::sqrt(dx * dx + dy * dy);
        }
    }
    return out;
}

}  // namespace relit
