// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "relit/image.hpp"
#include "relit/materials.hpp"

namespace relit {

struct WlsParams {
    double gradient_exponent = 1.2;  // larger -> sharper preserved edges
    double gradient_epsilon = 1e-4;  // guards the gradient denominators
    double smoothness_scale = 1.0;   // global multiplier; larger -> smoother
    double solver_tol = 1e-6;
    int solver_max_iter = 0;         // 0: ten times the pixel count
    double detail_epsilon = 1e-6;    // guards the detail division
    double detail_max = 100.0;       // caps detail amplification over dark pixels
};

/// Per-pixel smoothness weight: gradient magnitude of the luminance plus the
/// material gray term.
using LambdaMap = ImagePlane;

LambdaMap lambda_map(const ImagePlane& lum, const MaterialMap& map,
                     const MaterialPalette& palette);

/// Normal equations (I + A)s = l on the pixel grid, with A the weighted
/// Laplacian whose edge weights combine the smoothness scale, the lambda map
/// and the gradient denominators. Symmetric and strictly diagonally dominant
/// with unit diagonal floor, so positive definite.
struct WlsSystem {
    int width = 0;
    int height = 0;
    std::vector<double> diag;   // 1 + sum of incident couplings
    std::vector<double> right;  // coupling to the +x neighbor; 0 in the last column
    std::vector<double> down;   // coupling to the +y neighbor; 0 in the last row
    std::vector<double> rhs;    // the input channel

    std::size_t size() const noexcept { return diag.size(); }

    /// y = M x for the full system matrix M (diagonal minus couplings).
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

WlsSystem build_system(const ImagePlane& channel, const LambdaMap& lambda,
                       const WlsParams& params);

/// Diagonally preconditioned conjugate gradient, initial guess = rhs.
/// Stops once ||rhs - M s||_2 <= solver_tol * min(1, ||rhs||_2), which bounds
/// the per-pixel error by solver_tol as well. Throws SolverError on stall.
ImagePlane solve(const WlsSystem& system, const WlsParams& params);

struct Decomposition {
    ImagePlane large_scale;  // s
    ImagePlane detail;       // d = l / max(s, detail_epsilon)
};

Decomposition decompose(const ImagePlane& channel, const LambdaMap& lambda,
                        const WlsParams& params);

/// The discrete objective the system minimizes: data term plus weighted
/// smoothness term, using the exact stencil of build_system.
double energy(const ImagePlane& channel, const ImagePlane& smoothed,
              const LambdaMap& lambda, const WlsParams& params);

}  // namespace relit
