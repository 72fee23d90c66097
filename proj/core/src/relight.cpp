// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "relit/relight.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <utility>

#include "relit/error.hpp"
#include "relit/imgio.hpp"

namespace relit {

namespace {

class StageClock {
public:
    explicit StageClock(const PipelineConfig& config) : config_(config) {}

    template <typename F>
    auto run(const std::string& stage, F&& f) -> decltype(f()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            auto result = f();
            report(stage, start);
            return result;
        } catch (const StageError&) {
            throw;
        } catch (const Error& e) {
            throw StageError(stage, e.what());
        }
    }

private:
    void report(const std::string& stage,
                std::chrono::steady_clock::time_point start) const {
        if (!config_.stage_timer) return;
        const auto elapsed = std::chrono::steady_clock::now() - start;
        config_.stage_timer(stage,
                            std::chrono::duration<double, std::milli>(elapsed).count());
    }

    const PipelineConfig& config_;
};

ImagePlane rescaled_to_unit(const ImagePlane& plane, double* scale_out) {
    double max_value = 0.0;
    for (std::size_t i = 0; i < plane.pixel_count(); ++i)
        max_value = std::max(max_value, plane[i]);
    const double scale = max_value > 0.0 ? max_value : 1.0;
    ImagePlane scaled(plane.width(), plane.height());
    for (std::size_t i = 0; i < plane.pixel_count(); ++i) scaled[i] = plane[i] / scale;
    if (scale_out) *scale_out = scale;
    return scaled;
}

void write_scale(const std::filesystem::path& path, double scale) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scale sidecar: " + path.string());
    out.precision(17);
    out << scale << "\n";
}

// Detail layers can exceed 1; store them divided by a recorded global factor.
void save_detail(const ImageRgb& detail, const std::string& prefix) {
    double max_value = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < detail.channel(c).pixel_count(); ++i)
            max_value = std::max(max_value, detail.channel(c)[i]);
    const double scale = max_value > 0.0 ? max_value : 1.0;
    ImageRgb scaled(detail.width(), detail.height());
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < scaled.channel(c).pixel_count(); ++i)
            scaled.channel(c)[i] = detail.channel(c)[i] / scale;
    save_image(scaled, prefix + ".png");
    write_scale(prefix + "_scale.txt", scale);
}

struct RgbDecomposition {
    ImageRgb large_scale;
    ImageRgb detail;
};

RgbDecomposition decompose_rgb(const ImageRgb& img, const LambdaMap& lambda,
                               const WlsParams& params) {
    RgbDecomposition out;
    out.large_scale = ImageRgb(img.width(), img.height());
    out.detail = ImageRgb(img.width(), img.height());
    for (int c = 0; c < 3; ++c) {
        Decomposition d = decompose(img.channel(c), lambda, params);
        out.large_scale.channel(c) = std::move(d.large_scale);
        out.detail.channel(c) = std::move(d.detail);
    }
    return out;
}

ImageRgb compose(const ImageRgb& input, const ImageRgb& warped,
                 const MaterialMap& materials, const PipelineConfig& config,
                 StageClock& clock) {
    const LambdaMap lambda = clock.run("lambda", [&] {
        return lambda_map(luminance(input), materials, config.palette);
    });
    const RgbDecomposition input_layers =
        clock.run("wls-input", [&] { return decompose_rgb(input, lambda, config.wls); });
    const RgbDecomposition warped_layers =
        clock.run("wls-reference", [&] { return decompose_rgb(warped, lambda, config.wls); });

    ImageRgb out(input.width(), input.height());
    for (int c = 0; c < 3; ++c) {
        const ImagePlane& detail = input_layers.detail.channel(c);
        const ImagePlane& large = warped_layers.large_scale.channel(c);
        ImagePlane& channel = out.channel(c);
        for (std::size_t i = 0; i < channel.pixel_count(); ++i)
            channel[i] = std::clamp(detail[i] * large[i], 0.0, 1.0);
    }

    if (config.emit_intermediates) {
        const std::string prefix = config.intermediates_prefix.string();
        save_image(warped, prefix + "_warped.png");
        save_image(recolor(materials, config.palette), prefix + "_materials.png");
        double scale = 1.0;
        save_image(rescaled_to_unit(lambda, &scale), prefix + "_lambda.png");
        write_scale(prefix + "_lambda_scale.txt", scale);
        save_image(input_layers.large_scale, prefix + "_input_s.png");
        save_detail(input_layers.detail, prefix + "_input_d");
        save_image(warped_layers.large_scale, prefix + "_warped_s.png");
        save_detail(warped_layers.detail, prefix + "_warped_d");
    }
    return out;
}

}  // namespace

ImageRgb relight(const ImageRgb& input, const ImageRgb& reference,
                 const MaterialMap& input_materials, const PipelineConfig& config) {
    StageClock clock(config);
    if (input.width() != input_materials.width() ||
        input.height() != input_materials.height())
        throw StageError("input", "material map dimensions do not match the input image");

    const NearestNeighborField nnf = clock.run("patchmatch", [&] {
        return compute_nnf(input, reference, config.patchmatch);
    });
    const ImageRgb warped = clock.run("warp", [&] { return warp(reference, nnf); });
    return compose(input, warped, input_materials, config, clock);
}

ImageRgb relight_with_prewarped(const ImageRgb& input, const ImageRgb& warped_reference,
                                const MaterialMap& input_materials,
                                const PipelineConfig& config) {
    StageClock clock(config);
    if (input.width() != input_materials.width() ||
        input.height() != input_materials.height())
        throw StageError("input", "material map dimensions do not match the input image");
    if (input.width() != warped_reference.width() ||
        input.height() != warped_reference.height())
        throw StageError("input", "warped reference dimensions do not match the input image");
    return compose(input, warped_reference, input_materials, config, clock);
}

}  // namespace relit
