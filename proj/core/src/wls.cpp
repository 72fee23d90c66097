// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "relit/wls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relit/error.hpp"

namespace relit {

namespace {

void check_params(const WlsParams& p) {
    if (p.gradient_exponent <= 0.0) throw Error("gradient exponent must be positive");
    if (p.gradient_epsilon <= 0.0) throw Error("gradient epsilon must be positive");
    if (p.detail_epsilon <= 0.0) throw Error("detail epsilon must be positive");
    if (p.smoothness_scale < 0.0) throw Error("smoothness scale must be non-negative");
    if (p.solver_tol <= 0.0 || p.solver_tol >= 1.0)
        throw Error("solver tolerance must lie in (0,1)");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

LambdaMap lambda_map(const ImagePlane& lum, const MaterialMap& map,
                     const MaterialPalette& palette) {
    if (lum.width() != map.width() || lum.height() != map.height())
        throw SizingError("lambda_map: luminance is " + std::to_string(lum.width()) + "x" +
                          std::to_string(lum.height()) + " but material map is " +
                          std::to_string(map.width()) + "x" + std::to_string(map.height()));
    LambdaMap out = gradient_magnitude(lum);
    const ImagePlane term = material_gray_term(map, palette);
    for (std::size_t i = 0; i < out.pixel_count(); ++i) out[i] += term[i];
    return out;
}

void WlsSystem::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(x.size());
    const int w = width, h = height;
    for (int row = 0; row < h; ++row) {
        const std::size_t base = static_cast<std::size_t>(row) * w;
        for (int col = 0; col < w; ++col) {
            const std::size_t i = base + col;
            double v = diag[i] * x[i];
            if (col + 1 < w) v -= right[i] * x[i + 1];
            if (col > 0) v -= right[i - 1] * x[i - 1];
            if (row + 1 < h) v -= down[i] * x[i + w];
            if (row > 0) v -= down[i - w] * x[i - w];
            y[i] = v;
        }
    }
}

WlsSystem build_system(const ImagePlane& channel, const LambdaMap& lambda,
                       const WlsParams& params) {
    check_params(params);
    if (channel.width() != lambda.width() || channel.height() != lambda.height())
        throw SizingError("build_system: channel and lambda map dimensions differ");

    const int w = channel.width(), h = channel.height();
    const std::size_t n = channel.pixel_count();
    WlsSystem sys;
    sys.width = w;
    sys.height = h;
    sys.diag.assign(n, 1.0);
    sys.right.assign(n, 0.0);
    sys.down.assign(n, 0.0);
    sys.rhs = channel.data();

    const double a = params.gradient_exponent;
    const double eps = params.gradient_epsilon;
    const double scale = params.smoothness_scale;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w) {
                const double dx = channel.at(x + 1, y) - channel.at(x, y);
                const double coupling = scale * lambda[i] / (std::pow(std::abs(dx), a) + eps);
                sys.right[i] = coupling;
                sys.diag[i] += coupling;
                sys.diag[i + 1] += coupling;
            }
            if (y + 1 < h) {
                const double dy = channel.at(x, y + 1) - channel.at(x, y);
                const double coupling = scale * lambda[i] / (std::pow(std::abs(dy), a) + eps);
                sys.down[i] = coupling;
                sys.diag[i] += coupling;
                sys.diag[i + w] += coupling;
            }
        }
    }
    return sys;
}

ImagePlane solve(const WlsSystem& system, const WlsParams& params) {
    check_params(params);
    const std::size_t n = system.size();
    const std::vector<double>& b = system.rhs;
    const double bnorm = norm2(b);

    ImagePlane result(system.width, system.height);
    if (bnorm == 0.0) return result;  // M is SPD, so s = 0

    // An absolute-leaning target: also bounds the solution error per pixel by
    // solver_tol, since the smallest eigenvalue of the system is >= 1.
    const double target = params.solver_tol * std::min(1.0, bnorm);
    const long max_iter = params.solver_max_iter > 0
                              ? params.solver_max_iter
                              : static_cast<long>(10) * static_cast<long>(n);

    std::vector<double> x = b;  // initial guess: the channel itself
    std::vector<double> r(n), z(n), p(n), mp(n);
    system.apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    double rnorm = norm2(r);
    long iter = 0;
    while (rnorm > target && iter < max_iter) {
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / system.diag[i];
        double rz = dot(r, z);
        p = z;
        // Inner PCG loop; restarts with a fresh explicit residual whenever the
        // recurrence claims convergence, to keep the stopping test honest.
        while (iter < max_iter) {
            ++iter;
            system.apply(p, mp);
            const double alpha = rz / dot(p, mp);
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
            for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * mp[i];
            rnorm = norm2(r);
            if (rnorm <= target) break;
            for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / system.diag[i];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        system.apply(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        rnorm = norm2(r);
    }

    if (rnorm > target)
        throw SolverError("conjugate gradient did not converge: relative residual " +
                              std::to_string(rnorm / bnorm) + " after " +
                              std::to_string(iter) + " iterations",
                          rnorm / bnorm, static_cast<int>(iter));

    result.data() = std::move(x);
    return result;
}

Decomposition decompose(const ImagePlane& channel, const LambdaMap& lambda,
                        const WlsParams& params) {
    Decomposition out;
    out.large_scale = solve(build_system(channel, lambda, params), params);
    out.detail = ImagePlane(channel.width(), channel.height());
    for (std::size_t i = 0; i < channel.pixel_count(); ++i) {
        const double guarded = std::max(out.large_scale[i], params.detail_epsilon);
        out.detail[i] = std::min(channel[i] / guarded, params.detail_max);
    }
    return out;
}

double energy(const ImagePlane& channel, const ImagePlane& smoothed,
              const LambdaMap& lambda, const WlsParams& params) {
    check_params(params);
    if (channel.width() != smoothed.width() || channel.height() != smoothed.height() ||
        channel.width() != lambda.width() || channel.height() != lambda.height())
        throw SizingError("energy: dimensions differ");

    const int w = channel.width(), h = channel.height();
    const double a = params.gradient_exponent;
    const double eps = params.gradient_epsilon;

    double data = 0.0, smooth = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double diff = channel.at(x, y) - smoothed.at(x, y);
            data += diff * diff;
            if (x + 1 < w) {
                const double lx = channel.at(x + 1, y) - channel.at(x, y);
                const double sx = smoothed.at(x + 1, y) - smoothed.at(x, y);
                smooth += lambda.at(x, y) * sx * sx / (std::pow(std::abs(lx), a) + eps);
            }
            if (y + 1 < h) {
                const double ly = channel.at(x, y + 1) - channel.at(x, y);
                const double sy = smoothed.at(x, y + 1) - smoothed.at(x, y);
                smooth += lambda.at(x, y) * sy * sy / (std::pow(std::abs(ly), a) + eps);
            }
        }
    }
    return data + params.smoothness_scale * smooth;
}

}  // namespace relit
