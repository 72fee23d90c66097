// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oracle.hpp"
#include "relit/error.hpp"
#include "relit/wls.hpp"
#include "test_util.hpp"

using namespace relit;

namespace {

LambdaMap uniform_lambda(int w, int h, double value) { return ImagePlane(w, h, value); }

LambdaMap random_lambda(std::mt19937& rng, int w, int h) {
    return testutil::random_plane(rng, w, h, 0.0, 1.0);
}

double total_variation(const ImagePlane& p) {
    double tv = 0.0;
    for (int y = 0; y < p.height(); ++y)
        for (int x = 0; x < p.width(); ++x) {
            if (x + 1 < p.width()) tv += std::abs(p.at(x + 1, y) - p.at(x, y));
            if (y + 1 < p.height()) tv += std::abs(p.at(x, y + 1) - p.at(x, y));
        }
    return tv;
}

}  // namespace

TEST_CASE("lambda_map adds the gradient magnitude and the material term") {
    MaterialPalette palette;
    palette.entries = {{0, "black", 0, 0, 0}, {1, "white", 255, 255, 255}};

    SUBCASE("constant luminance, black material: all zero") {
        const ImagePlane lum(4, 4, 0.5);
        const MaterialMap map(4, 4, 0);
        const LambdaMap lam = lambda_map(lum, map, palette);
        for (double v : lam.data()) CHECK(v == 0.0);
    }

    SUBCASE("constant luminance, white material: the gray term") {
        const ImagePlane lum(4, 4, 0.5);
        const MaterialMap map(4, 4, 1);
        const LambdaMap lam = lambda_map(lum, map, palette);
        for (double v : lam.data()) CHECK(v == doctest::Approx(254.9745 / 255.0).epsilon(1e-9));
    }

    SUBCASE("step edge raises lambda by exactly the gradient magnitude") {
        ImagePlane lum(4, 1, 0.2);
        lum.at(2, 0) = 0.9;
        lum.at(3, 0) = 0.9;
        const MaterialMap map(4, 1, 0);
        const LambdaMap lam = lambda_map(lum, map, palette);
        const ImagePlane grad = gradient_magnitude(lum);
        for (int x = 0; x < 4; ++x)
            CHECK(lam.at(x, 0) == doctest::Approx(grad.at(x, 0)).epsilon(1e-12));
    }

    SUBCASE("dimension mismatch raises a sizing error") {
        const ImagePlane lum(4, 4, 0.5);
        const MaterialMap map(3, 4, 0);
        CHECK_THROWS_AS(lambda_map(lum, map, palette), SizingError);
    }
}

TEST_CASE("zero smoothness scale yields the identity system") {
    std::mt19937 rng(41);
    const ImagePlane l = testutil::random_plane(rng, 6, 5);
    WlsParams params;
    params.smoothness_scale = 0.0;
    const WlsSystem sys = build_system(l, uniform_lambda(6, 5, 0.7), params);
    for (double d : sys.diag) CHECK(d == 1.0);
    for (double r : sys.right) CHECK(r == 0.0);
    const ImagePlane s = solve(sys, params);
    CHECK(testutil::max_abs_diff(s, l) == 0.0);
}

TEST_CASE("1x2 system matches the hand-derived normal equations") {
    // Two pixels in a row: E = (l0-s0)^2 + (l1-s1)^2 + c (s1-s0)^2 with
    // c = scale * lambda0 / (|l1-l0|^a + eps). Setting the gradient to zero
    // gives s0 = (l0 + c (l0+l1)) / (1 + 2c) and symmetrically for s1.
    const double l0 = 0.2, l1 = 0.9, lambda0 = 0.6;
    WlsParams params;
    params.solver_tol = 1e-9;
    ImagePlane l(2, 1);
    l.at(0, 0) = l0;
    l.at(1, 0) = l1;
    const WlsSystem sys = build_system(l, uniform_lambda(2, 1, lambda0), params);

    const double c = params.smoothness_scale * lambda0 /
                     (std::pow(std::abs(l1 - l0), params.gradient_exponent) +
                      params.gradient_epsilon);
    CHECK(sys.diag[0] == doctest::Approx(1.0 + c).epsilon(1e-12));
    CHECK(sys.diag[1] == doctest::Approx(1.0 + c).epsilon(1e-12));
    CHECK(sys.right[0] == doctest::Approx(c).epsilon(1e-12));

    const double det = (1.0 + c) * (1.0 + c) - c * c;
    const double s0 = ((1.0 + c) * l0 + c * l1) / det;
    const double s1 = (c * l0 + (1.0 + c) * l1) / det;
    const ImagePlane s = solve(sys, params);
    CHECK(s.at(0, 0) == doctest::Approx(s0).epsilon(1e-8));
    CHECK(s.at(1, 0) == doctest::Approx(s1).epsilon(1e-8));
}

TEST_CASE("system rows of the Laplacian part sum to zero") {
    std::mt19937 rng(42);
    const ImagePlane l = testutil::random_plane(rng, 8, 8);
    const WlsSystem sys = build_system(l, random_lambda(rng, 8, 8), WlsParams{});
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * 8 + x;
            double row = sys.diag[i] - 1.0;  // remove the data-term identity
            if (x + 1 < 8) row -= sys.right[i];
            if (x > 0) row -= sys.right[i - 1];
            if (y + 1 < 8) row -= sys.down[i];
            if (y > 0) row -= sys.down[i - 8];
            CHECK(std::abs(row) < 1e-9);
        }
    }
}

TEST_CASE("constant channels are preserved to solver tolerance") {
    std::mt19937 rng(43);
    const ImagePlane l(12, 9, 0.42);
    const WlsSystem sys = build_system(l, random_lambda(rng, 12, 9), WlsParams{});
    const ImagePlane s = solve(sys, WlsParams{});
    CHECK(testutil::max_abs_diff(s, l) <= WlsParams{}.solver_tol);
}

TEST_CASE("iterative solve matches the dense oracle") {
    std::mt19937 rng(44);
    for (int trial = 0; trial < 3; ++trial) {
        const int w = 16, h = 16;
        const ImagePlane l = testutil::random_plane(rng, w, h);
        const LambdaMap lam = random_lambda(rng, w, h);
        const ImagePlane iterative = solve(build_system(l, lam, WlsParams{}), WlsParams{});
        const ImagePlane direct = oracle::dense_wls_solve(l, lam, WlsParams{});
        CHECK(testutil::max_abs_diff(iterative, direct) < 1e-5);
    }
}

TEST_CASE("solver obeys the discrete maximum principle") {
    std::mt19937 rng(45);
    for (int trial = 0; trial < 3; ++trial) {
        const ImagePlane l = testutil::random_plane(rng, 14, 11);
        const ImagePlane s = solve(build_system(l, random_lambda(rng, 14, 11), WlsParams{}),
                                   WlsParams{});
        const auto [lo, hi] = std::minmax_element(l.data().begin(), l.data().end());
        for (double v : s.data()) {
            CHECK(v >= *lo - 1e-6);
            CHECK(v <= *hi + 1e-6);
        }
    }
}

TEST_CASE("energy agrees with the minimizer property") {
    std::mt19937 rng(46);
    const ImagePlane l = testutil::random_plane(rng, 10, 10);
    const LambdaMap lam = random_lambda(rng, 10, 10);
    const WlsParams params;
    const ImagePlane s = solve(build_system(l, lam, params), params);
    const double e_min = energy(l, s, lam, params);

    CHECK(e_min <= energy(l, l, lam, params));

    std::normal_distribution<double> noise(0.0, 0.01);
    for (int k = 0; k < 20; ++k) {
        ImagePlane probe = s;
        for (auto& v : probe.data()) v += noise(rng);
        CHECK(e_min <= energy(l, probe, lam, params));
    }
}

TEST_CASE("energy is zero when smoothing a constant with itself") {
    const ImagePlane l(5, 5, 0.3);
    CHECK(energy(l, l, uniform_lambda(5, 5, 0.8), WlsParams{}) == 0.0);
}

TEST_CASE("decompose reconstructs the channel and handles constants") {
    SUBCASE("constant channel") {
        const ImagePlane l(8, 8, 0.5);
        const Decomposition d = decompose(l, uniform_lambda(8, 8, 0.6), WlsParams{});
        CHECK(testutil::max_abs_diff(d.large_scale, l) <= 1e-6);
        for (double v : d.detail.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("reconstruction identity") {
        std::mt19937 rng(47);
        const ImagePlane l = testutil::random_plane(rng, 12, 12);
        const WlsParams params;
        const Decomposition d = decompose(l, random_lambda(rng, 12, 12), params);
        for (std::size_t i = 0; i < l.pixel_count(); ++i) {
            const double guarded = std::max(d.large_scale[i], params.detail_epsilon);
            CHECK(std::abs(d.detail[i] * guarded - l[i]) < 1e-9);
            CHECK(d.detail[i] >= 0.0);
            CHECK(std::isfinite(d.detail[i]));
        }
    }

    SUBCASE("noisy step keeps the step but flattens noise") {
        std::mt19937 rng(48);
        std::uniform_real_distribution<double> noise(-0.04, 0.04);
        const int w = 32, h = 8;
        ImagePlane l(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                l.at(x, y) = (x < w / 2 ? 0.25 : 0.75) + noise(rng);
        const Decomposition d = decompose(l, uniform_lambda(w, h, 0.8), WlsParams{});

        // variance within each flat half drops
        const auto variance = [&](const ImagePlane& p, int x0, int x1) {
            double mean = 0.0;
            int n = 0;
            for (int y = 0; y < h; ++y)
                for (int x = x0; x < x1; ++x, ++n) mean += p.at(x, y);
            mean /= n;
            double var = 0.0;
            for (int y = 0; y < h; ++y)
                for (int x = x0; x < x1; ++x) var += (p.at(x, y) - mean) * (p.at(x, y) - mean);
            return var / n;
        };
        CHECK(variance(d.large_scale, 2, w / 2 - 2) < variance(l, 2, w / 2 - 2));
        CHECK(variance(d.large_scale, w / 2 + 2, w - 2) < variance(l, w / 2 + 2, w - 2));
        // the step survives
        CHECK(d.large_scale.at(w / 2 + 4, h / 2) - d.large_scale.at(w / 2 - 4, h / 2) > 0.3);
    }
}

TEST_CASE("raising the smoothness scale weakly lowers total variation") {
    std::mt19937 rng(49);
    const ImagePlane l = testutil::random_plane(rng, 16, 16);
    const LambdaMap lam = uniform_lambda(16, 16, 0.5);
    double previous_tv = std::numeric_limits<double>::infinity();
    for (const double scale : {0.0, 1.0, 10.0}) {
        WlsParams params;
        params.smoothness_scale = scale;
        const ImagePlane s = solve(build_system(l, lam, params), params);
        const double tv = total_variation(s);
        CHECK(tv <= previous_tv + 1e-9);
        previous_tv = tv;
    }
}

TEST_CASE("solver reports non-convergence with the achieved residual") {
    std::mt19937 rng(50);
    const ImagePlane l = testutil::random_plane(rng, 16, 16);
    WlsParams params;
    params.solver_max_iter = 2;  // far too few
    params.solver_tol = 1e-12;
    const WlsSystem sys = build_system(l, uniform_lambda(16, 16, 0.9), params);
    try {
        solve(sys, params);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.relative_residual() > 0.0);
        CHECK(e.iterations() == 2);
    }
}

TEST_CASE("parameter validation") {
    const ImagePlane l(4, 4, 0.5);
    const LambdaMap lam(4, 4, 0.5);
    WlsParams params;
    params.gradient_epsilon = 0.0;
    CHECK_THROWS_AS(build_system(l, lam, params), Error);
    params = WlsParams{};
    params.solver_tol = 1.5;
    CHECK_THROWS_AS(build_system(l, lam, params), Error);
    params = WlsParams{};
    CHECK_THROWS_AS(build_system(l, ImagePlane(3, 3, 0.5), params), SizingError);
}
