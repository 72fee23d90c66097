// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "relit/image.hpp"

namespace relit {

struct PatchMatchParams {
    int patch_size = 7;
    int iterations = 5;
    std::optional<int> search_radius;  // unset: max(reference width, height)
    double search_decay = 0.5;         // in (0,1)
    std::uint64_t seed = 0;
};

/// Per-cell best offsets into the reference and their cached patch distances.
/// Cells are the valid top-left patch coordinates of the input image; every
/// stored offset addresses a fully in-bounds reference patch.
class NearestNeighborField {
public:
    NearestNeighborField() = default;
    NearestNeighborField(int cells_x, int cells_y, int patch_size)
        : cells_x_(cells_x), cells_y_(cells_y), patch_size_(patch_size),
          offsets_(static_cast<std::size_t>(cells_x) * cells_y),
          distances_(static_cast<std::size_t>(cells_x) * cells_y, 0.0) {}

    int cells_x() const noexcept { return cells_x_; }
    int cells_y() const noexcept { return cells_y_; }
    int patch_size() const noexcept { return patch_size_; }
    std::size_t cell_count() const noexcept { return offsets_.size(); }

    Offset offset(int x, int y) const { return offsets_[index(x, y)]; }
    double distance(int x, int y) const { return distances_[index(x, y)]; }
    void set_match(int x, int y, Offset offset, double distance) {
        offsets_[index(x, y)] = offset;
        distances_[index(x, y)] = distance;
    }

    double mean_distance() const;

    const std::vector<Offset>& offsets() const noexcept { return offsets_; }
    const std::vector<double>& distances() const noexcept { return distances_; }

    friend bool operator==(const NearestNeighborField&, const NearestNeighborField&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * cells_x_ + x;
    }

    int cells_x_ = 0;
    int cells_y_ = 0;
    int patch_size_ = 0;
    std::vector<Offset> offsets_;
    std::vector<double> distances_;
};

enum class ScanDirection { forward, backward };

/// Sum of squared channel differences over a patch_size^2 window. The offset
/// must address an in-bounds reference patch.
double patch_distance(const ImageRgb& input, const ImageRgb& reference,
                      PixelCoord patch, Offset offset, int patch_size);

/// Uniform random offsets over all valid reference patch coordinates,
/// deterministic in the seed.
NearestNeighborField init_nnf(const ImageRgb& input, const ImageRgb& reference,
                              const PatchMatchParams& params);

/// One scan of neighbor-offset reuse. Forward scans pull from the left/top
/// neighbors, backward scans from the right/bottom ones. Candidates are
/// clamped into the valid reference range; distances never increase.
void propagate(NearestNeighborField& nnf, const ImageRgb& input,
               const ImageRgb& reference, ScanDirection direction);

/// Samples around each cell's current best in exponentially shrinking
/// windows. `round` salts the per-cell random streams; distances never
/// increase.
void random_search(NearestNeighborField& nnf, const ImageRgb& input,
                   const ImageRgb& reference, const PatchMatchParams& params,
                   int round = 0);

/// init, then `iterations` rounds of alternating-scan propagation followed by
/// random search.
NearestNeighborField compute_nnf(const ImageRgb& input, const ImageRgb& reference,
                                 const PatchMatchParams& params);

/// Reconstructs an input-aligned image by averaging, at every pixel, the
/// reference pixels voted by all matched patches overlapping it.
ImageRgb warp(const ImageRgb& reference, const NearestNeighborField& nnf);

/// The shrinking window radii: max_radius * decay^i while >= 1.
std::vector<double> search_radii(double max_radius, double decay);

/// Binary sidecar: "NNF1", then grid width, grid height, patch size as u32
/// little-endian, then per cell dx, dy as i32 little-endian, row-major.
void write_nnf(const NearestNeighborField& nnf, const std::filesystem::path& path);

/// Restores dimensions and offsets; the sidecar has no distances, so they
/// come back zero.
NearestNeighborField read_nnf(const std::filesystem::path& path);

}  // namespace relit
