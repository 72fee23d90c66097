// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "relit/error.hpp"
#include "relit/imgio.hpp"
#include "relit/materials.hpp"
#include "relit/patchmatch.hpp"
#include "relit/relight.hpp"
#include "relit/wls.hpp"

namespace {

using relit::Error;
using relit::StageError;

struct PmFlags {
    int patch_size = 7;
    int iterations = 5;
    std::string search_radius = "auto";
    double alpha = 0.5;
    std::uint64_t seed = 0;
};

struct WlsFlags {
    double alpha = 1.2;
    double epsilon = 1e-4;
    double lambda_scale = 1.0;
    double solver_tol = 1e-6;
    int solver_max_iter = 0;
    double eps_div = 1e-6;
};

const CLI::Validator OpenUnitInterval(
    [](std::string& s) -> std::string {
        double v;
        try {
            v = std::stod(s);
        } catch (...) {
            return "'" + s + "' is not a number";
        }
        if (v <= 0.0 || v >= 1.0) return "value " + s + " must lie strictly in (0,1)";
        return {};
    },
    "FLOAT in (0,1)");

const CLI::Validator AutoOrRadius(
    [](std::string& s) -> std::string {
        if (s == "auto") return {};
        try {
            if (std::stoi(s) >= 1) return {};
        } catch (...) {
        }
        return "'" + s + "' must be 'auto' or an integer >= 1";
    },
    "'auto' or INT >= 1");

void add_pm_flags(CLI::App* cmd, PmFlags& f) {
    cmd->add_option("--seed", f.seed, "RNG seed for PatchMatch")->capture_default_str();
    cmd->add_option("--patch-size", f.patch_size, "Patch size in pixels")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pm-iters", f.iterations, "PatchMatch iterations")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pm-w", f.search_radius,
                    "Max search radius; 'auto' means max(reference width, height)")
        ->capture_default_str()
        ->check(AutoOrRadius);
    cmd->add_option("--pm-alpha", f.alpha, "Search radius decay rate")
        ->capture_default_str()
        ->check(OpenUnitInterval);
}

void add_wls_flags(CLI::App* cmd, WlsFlags& f) {
    cmd->add_option("--wls-alpha", f.alpha, "Gradient sensitivity exponent")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--wls-eps", f.epsilon, "Gradient denominator guard")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-scale", f.lambda_scale, "Global smoothness multiplier")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--solver-tol", f.solver_tol, "Solver residual target")
        ->capture_default_str()
        ->check(OpenUnitInterval);
    cmd->add_option("--solver-max-iter", f.solver_max_iter,
                    "Solver iteration cap (0: ten times the pixel count)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--eps-div", f.eps_div, "Detail division guard")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

relit::PatchMatchParams to_params(const PmFlags& f) {
    relit::PatchMatchParams p;
    p.patch_size = f.patch_size;
    p.iterations = f.iterations;
    if (f.search_radius != "auto") p.search_radius = std::stoi(f.search_radius);
    p.search_decay = f.alpha;
    p.seed = f.seed;
    return p;
}

relit::WlsParams to_params(const WlsFlags& f) {
    relit::WlsParams p;
    p.gradient_exponent = f.alpha;
    p.gradient_epsilon = f.epsilon;
    p.smoothness_scale = f.lambda_scale;
    p.solver_tol = f.solver_tol;
    p.solver_max_iter = f.solver_max_iter;
    p.detail_epsilon = f.eps_div;
    return p;
}

void print_stage_time(const std::string& stage, double ms) {
    std::fprintf(stderr, "stage %s: %.1f ms\n", stage.c_str(), ms);
}

template <typename F>
auto timed_stage(const std::string& stage, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
        auto result = fn();
        const auto elapsed = std::chrono::steady_clock::now() - start;
        print_stage_time(stage, std::chrono::duration<double, std::milli>(elapsed).count());
        return result;
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.what());
    }
}

relit::MaterialPalette palette_from(const std::string& path) {
    return path.empty() ? relit::default_palette() : relit::load_palette(path);
}

std::string strip_extension(const std::string& path) {
    return std::filesystem::path(path).replace_extension().string();
}

struct RelightArgs {
    std::string input, reference, materials, output, palette;
    PmFlags pm;
    WlsFlags wls;
    bool emit_intermediates = false;
};

void run_relight(const RelightArgs& args) {
    const auto palette = timed_stage("load-palette", [&] { return palette_from(args.palette); });
    const auto input =
        timed_stage("load-input", [&] { return relit::load_image(args.input).image; });
    const auto reference =
        timed_stage("load-reference", [&] { return relit::load_image(args.reference).image; });
    const auto materials = timed_stage("load-materials", [&] {
        return relit::load_material_map(args.materials, palette);
    });

    relit::PipelineConfig config;
    config.patchmatch = to_params(args.pm);
    config.wls = to_params(args.wls);
    config.palette = palette;
    config.emit_intermediates = args.emit_intermediates;
    config.intermediates_prefix = strip_extension(args.output);
    config.stage_timer = print_stage_time;

    const relit::ImageRgb out = relit::relight(input, reference, materials, config);
    timed_stage("save-output", [&] {
        relit::save_image(out, args.output);
        return 0;
    });
    std::printf("%s\n", args.output.c_str());
}

struct WarpArgs {
    std::string input, reference, output, dump_nnf;
    PmFlags pm;
};

void run_warp(const WarpArgs& args) {
    const auto input =
        timed_stage("load-input", [&] { return relit::load_image(args.input).image; });
    const auto reference =
        timed_stage("load-reference", [&] { return relit::load_image(args.reference).image; });
    const auto params = to_params(args.pm);
    const auto nnf = timed_stage("patchmatch",
                                 [&] { return relit::compute_nnf(input, reference, params); });
    const auto warped = timed_stage("warp", [&] { return relit::warp(reference, nnf); });
    timed_stage("save-output", [&] {
        relit::save_image(warped, args.output);
        if (!args.dump_nnf.empty()) relit::write_nnf(nnf, args.dump_nnf);
        return 0;
    });
    std::printf("%s\n", args.output.c_str());
    if (!args.dump_nnf.empty()) std::printf("%s\n", args.dump_nnf.c_str());
}

struct DecomposeArgs {
    std::string input, materials, out_prefix, palette;
    WlsFlags wls;
};

void run_decompose(const DecomposeArgs& args) {
    const auto palette = timed_stage("load-palette", [&] { return palette_from(args.palette); });
    const auto input =
        timed_stage("load-input", [&] { return relit::load_image(args.input).image; });
    const auto materials = timed_stage("load-materials", [&] {
        return relit::load_material_map(args.materials, palette);
    });
    const auto params = to_params(args.wls);

    const relit::LambdaMap lambda = timed_stage("lambda", [&] {
        return relit::lambda_map(relit::luminance(input), materials, palette);
    });

    relit::ImageRgb large(input.width(), input.height());
    relit::ImageRgb detail(input.width(), input.height());
    timed_stage("wls", [&] {
        for (int c = 0; c < 3; ++c) {
            relit::Decomposition d = relit::decompose(input.channel(c), lambda, params);
            large.channel(c) = std::move(d.large_scale);
            detail.channel(c) = std::move(d.detail);
        }
        return 0;
    });

    timed_stage("save-output", [&] {
        double detail_max = 0.0;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < detail.channel(c).pixel_count(); ++i)
                detail_max = std::max(detail_max, detail.channel(c)[i]);
        const double detail_scale = detail_max > 0.0 ? detail_max : 1.0;
        relit::ImageRgb detail_scaled(detail.width(), detail.height());
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < detail.channel(c).pixel_count(); ++i)
                detail_scaled.channel(c)[i] = detail.channel(c)[i] / detail_scale;

        double lambda_max = 0.0;
        for (std::size_t i = 0; i < lambda.pixel_count(); ++i)
            lambda_max = std::max(lambda_max, lambda[i]);
        const double lambda_scale_out = lambda_max > 0.0 ? lambda_max : 1.0;
        relit::ImagePlane lambda_scaled(lambda.width(), lambda.height());
        for (std::size_t i = 0; i < lambda.pixel_count(); ++i)
            lambda_scaled[i] = lambda[i] / lambda_scale_out;

        relit::save_image(large, args.out_prefix + "_s.png");
        relit::save_image(detail_scaled, args.out_prefix + "_d.png");
        relit::save_image(lambda_scaled, args.out_prefix + "_lambda.png");

        auto write_scale = [](const std::string& path, double value) {
            std::FILE* f = std::fopen(path.c_str(), "w");
            if (!f) throw relit::IoError("cannot write scale sidecar: " + path);
            std::fprintf(f, "%.17g\n", value);
            std::fclose(f);
        };
        write_scale(args.out_prefix + "_d_scale.txt", detail_scale);
        write_scale(args.out_prefix + "_lambda_scale.txt", lambda_scale_out);
        return 0;
    });
    std::printf("%s_s.png\n%s_d.png\n%s_lambda.png\n", args.out_prefix.c_str(),
                args.out_prefix.c_str(), args.out_prefix.c_str());
}

struct MaterialsArgs {
    std::string map, palette, output;
};

void run_materials(const MaterialsArgs& args) {
    const auto palette = timed_stage("load-palette", [&] { return palette_from(args.palette); });
    const auto map = timed_stage("load-map", [&] {
        return relit::load_material_map(args.map, palette);
    });
    timed_stage("save-output", [&] {
        relit::save_image(relit::recolor(map, palette), args.output);
        return 0;
    });
    std::printf("%s\n", args.output.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relights a photograph to match the illumination of a reference image"};
    app.require_subcommand(1);

    RelightArgs relight_args;
    CLI::App* relight_cmd =
        app.add_subcommand("relight", "Full pipeline: warp, decompose, compose");
    relight_cmd->set_config("--config", "", "Read option defaults from a key=value file");
    relight_cmd->add_option("--input", relight_args.input, "Input image (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    relight_cmd->add_option("--reference", relight_args.reference, "Reference image (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    relight_cmd->add_option("--materials", relight_args.materials, "Material label map (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    relight_cmd->add_option("--output", relight_args.output, "Output image path")->required();
    relight_cmd->add_option("--palette", relight_args.palette, "Palette file (default: built-in)")
        ->check(CLI::ExistingFile);
    relight_cmd->add_flag("--emit-intermediates", relight_args.emit_intermediates,
                          "Also write warped/material/layer/lambda images");
    add_pm_flags(relight_cmd, relight_args.pm);
    add_wls_flags(relight_cmd, relight_args.wls);
    relight_cmd->callback([&] { run_relight(relight_args); });

    WarpArgs warp_args;
    CLI::App* warp_cmd = app.add_subcommand("warp", "Warp the reference onto the input");
    warp_cmd->set_config("--config", "", "Read option defaults from a key=value file");
    warp_cmd->add_option("--input", warp_args.input, "Input image (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    warp_cmd->add_option("--reference", warp_args.reference, "Reference image (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    warp_cmd->add_option("--output", warp_args.output, "Warped image path")->required();
    warp_cmd->add_option("--dump-nnf", warp_args.dump_nnf, "Also write the NNF sidecar here");
    add_pm_flags(warp_cmd, warp_args.pm);
    warp_cmd->callback([&] { run_warp(warp_args); });

    DecomposeArgs decompose_args;
    CLI::App* decompose_cmd =
        app.add_subcommand("decompose", "Write large-scale, detail and lambda layers");
    decompose_cmd->set_config("--config", "", "Read option defaults from a key=value file");
    decompose_cmd->add_option("--input", decompose_args.input, "Input image (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    decompose_cmd->add_option("--materials", decompose_args.materials, "Material label map (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    decompose_cmd->add_option("--out-prefix", decompose_args.out_prefix, "Output path prefix")
        ->required();
    decompose_cmd->add_option("--palette", decompose_args.palette,
                              "Palette file (default: built-in)")
        ->check(CLI::ExistingFile);
    add_wls_flags(decompose_cmd, decompose_args.wls);
    decompose_cmd->callback([&] { run_decompose(decompose_args); });

    MaterialsArgs materials_args;
    CLI::App* materials_cmd =
        app.add_subcommand("materials", "Recolor a material label map for inspection");
    materials_cmd->add_option("--map", materials_args.map, "Material label map (PNG)")
        ->required()
        ->check(CLI::ExistingFile);
    materials_cmd->add_option("--palette", materials_args.palette,
                              "Palette file (default: built-in)")
        ->check(CLI::ExistingFile);
    materials_cmd->add_option("--output", materials_args.output, "Recolored preview path")
        ->required();
    materials_cmd->callback([&] { run_materials(materials_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::fprintf(stderr, "run 'relit --help' for usage\n");
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
