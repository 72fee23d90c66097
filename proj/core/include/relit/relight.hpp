// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "relit/image.hpp"
#include "relit/materials.hpp"
#include "relit/patchmatch.hpp"
#include "relit/wls.hpp"

namespace relit {

struct PipelineConfig {
    PatchMatchParams patchmatch;
    WlsParams wls;
    MaterialPalette palette = default_palette();
    bool emit_intermediates = false;
    std::filesystem::path intermediates_prefix;  // "<prefix>_warped.png" etc.
    // Called after each stage with its wall-clock duration, when set.
    std::function<void(const std::string& stage, double milliseconds)> stage_timer;
};

/// Full pipeline: warp the reference onto the input with PatchMatch, then
/// swap large-scale layers. Per channel the output is the input's detail
/// layer times the warped reference's large-scale layer, clamped to [0,1].
/// The lambda map is built once from the input's luminance and material map
/// and shared by both decompositions. Errors carry the failing stage's name.
ImageRgb relight(const ImageRgb& input, const ImageRgb& reference,
                 const MaterialMap& input_materials, const PipelineConfig& config);

/// The decomposition and composition stages only, for references aligned by
/// other means. The warped reference must match the input's dimensions.
ImageRgb relight_with_prewarped(const ImageRgb& input, const ImageRgb& warped_reference,
                                const MaterialMap& input_materials,
                                const PipelineConfig& config);

}  // namespace relit
