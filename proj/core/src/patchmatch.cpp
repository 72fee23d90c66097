// Copyright (c) 2026 The relit authors.
// SPDX-License-Identifier: Apache-2.0

#include "relit/patchmatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "relit/error.hpp"

namespace relit {

namespace {

// Deterministic across platforms, unlike the standard distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_signed_unit() { return next_unit() * 2.0 - 1.0; }

private:
    std::uint64_t state_;
};

std::uint64_t scramble(std::uint64_t x) { return SplitMix64(x).next(); }

// Stream seed for one cell of one search round.
std::uint64_t cell_stream(std::uint64_t seed, int round, std::uint64_t cell) {
    std::uint64_t s = scramble(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(round) + 1)));
    return scramble(s ^ (0xbf58476d1ce4e5b9ULL * (cell + 1)));
}

struct PatchGrid {
    int cells_x, cells_y;    // valid input patch coordinates
    int target_x, target_y;  // valid reference patch coordinates
};

PatchGrid patch_grid(const ImageRgb& input, const ImageRgb& reference, int patch_size) {
    if (patch_size < 1) throw Error("patch size must be >= 1");
    if (input.width() < patch_size || input.height() < patch_size ||
        reference.width() < patch_size || reference.height() < patch_size)
        throw SizingError("images must be at least patch_size (" +
                          std::to_string(patch_size) + ") in each dimension; input is " +
                          std::to_string(input.width()) + "x" + std::to_string(input.height()) +
                          ", reference is " + std::to_string(reference.width()) + "x" +
                          std::to_string(reference.height()));
    return {input.width() - patch_size + 1, input.height() - patch_size + 1,
            reference.width() - patch_size + 1, reference.height() - patch_size + 1};
}

PatchGrid checked_grid(const NearestNeighborField& nnf, const ImageRgb& input,
                       const ImageRgb& reference) {
    const PatchGrid grid = patch_grid(input, reference, nnf.patch_size());
    if (grid.cells_x != nnf.cells_x() || grid.cells_y != nnf.cells_y())
        throw SizingError("nearest-neighbor field does not match the input dimensions");
    return grid;
}

void check_search_params(const PatchMatchParams& params) {
    if (params.iterations < 1) throw Error("iterations must be >= 1");
    if (params.search_decay <= 0.0 || params.search_decay >= 1.0)
        throw Error("search decay must lie in (0,1)");
    if (params.search_radius && *params.search_radius < 1)
        throw Error("search radius must be >= 1");
}

}  // namespace

double NearestNeighborField::mean_distance() const {
    if (distances_.empty()) return 0.0;
    double sum = 0.0;
    for (double d : distances_) sum += d;
    return sum / static_cast<double>(distances_.size());
}

double patch_distance(const ImageRgb& input, const ImageRgb& reference,
                      PixelCoord patch, Offset offset, int patch_size) {
    const int bx = patch.x + offset.dx;
    const int by = patch.y + offset.dy;
    assert(patch.x >= 0 && patch.y >= 0 &&
           patch.x + patch_size <= input.width() && patch.y + patch_size <= input.height());
    assert(bx >= 0 && by >= 0 &&
           bx + patch_size <= reference.width() && by + patch_size <= reference.height());

    const int aw = input.width();
    const int bw = reference.width();
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double* pa = input.channel(c).data().data();
        const double* pb = reference.channel(c).data().data();
        for (int y = 0; y < patch_size; ++y) {
            const double* row_a = pa + static_cast<std::size_t>(patch.y + y) * aw + patch.x;
            const double* row_b = pb + static_cast<std::size_t>(by + y) * bw + bx;
            for (int x = 0; x < patch_size; ++x) {
                const double d = row_a[x] - row_b[x];
                sum += d * d;
            }
        }
    }
    return sum;
}

NearestNeighborField init_nnf(const ImageRgb& input, const ImageRgb& reference,
                              const PatchMatchParams& params) {
    const PatchGrid grid = patch_grid(input, reference, params.patch_size);
    NearestNeighborField nnf(grid.cells_x, grid.cells_y, params.patch_size);
    SplitMix64 rng(scramble(params.seed));
    for (int y = 0; y < grid.cells_y; ++y) {
        for (int x = 0; x < grid.cells_x; ++x) {
            const int tx = static_cast<int>(rng.next_below(grid.target_x));
            const int ty = static_cast<int>(rng.next_below(grid.target_y));
            const Offset offset{tx - x, ty - y};
            nnf.set_match(x, y, offset,
                          patch_distance(input, reference, {x, y}, offset, params.patch_size));
        }
    }
    return nnf;
}

void propagate(NearestNeighborField& nnf, const ImageRgb& input,
               const ImageRgb& reference, ScanDirection direction) {
    const PatchGrid grid = checked_grid(nnf, input, reference);
    const int patch = nnf.patch_size();
    const bool forward = direction == ScanDirection::forward;
    const int step = forward ? -1 : 1;  // where the already-visited neighbors sit

    const int y_begin = forward ? 0 : grid.cells_y - 1;
    const int y_end = forward ? grid.cells_y : -1;
    const int x_begin = forward ? 0 : grid.cells_x - 1;
    const int x_end = forward ? grid.cells_x : -1;
    const int scan = forward ? 1 : -1;

    for (int y = y_begin; y != y_end; y += scan) {
        for (int x = x_begin; x != x_end; x += scan) {
            Offset best = nnf.offset(x, y);
            double best_dist = nnf.distance(x, y);
            const int nx[3] = {x + step, x, x + step};
            const int ny[3] = {y, y + step, y + step};
            for (int k = 0; k < 3; ++k) {
                if (nx[k] < 0 || nx[k] >= grid.cells_x || ny[k] < 0 || ny[k] >= grid.cells_y)
                    continue;
                const Offset neighbor = nnf.offset(nx[k], ny[k]);
                const int tx = std::clamp(x + neighbor.dx, 0, grid.target_x - 1);
                const int ty = std::clamp(y + neighbor.dy, 0, grid.target_y - 1);
                const Offset candidate{tx - x, ty - y};
                if (candidate == best) continue;
                const double d = patch_distance(input, reference, {x, y}, candidate, patch);
                if (d < best_dist) {
                    best_dist = d;
                    best = candidate;
                }
            }
            nnf.set_match(x, y, best, best_dist);
        }
    }
}

void random_search(NearestNeighborField& nnf, const ImageRgb& input,
                   const ImageRgb& reference, const PatchMatchParams& params,
                   int round) {
    const PatchGrid grid = checked_grid(nnf, input, reference);
    check_search_params(params);
    const int patch = nnf.patch_size();
    const int max_radius =
        params.search_radius.value_or(std::max(reference.width(), reference.height()));
    if (max_radius < 1) throw Error("search radius must be >= 1");
    const std::vector<double> radii = search_radii(max_radius, params.search_decay);

    for (int y = 0; y < grid.cells_y; ++y) {
        for (int x = 0; x < grid.cells_x; ++x) {
            const std::uint64_t cell = static_cast<std::uint64_t>(y) * grid.cells_x + x;
            SplitMix64 rng(cell_stream(params.seed, round, cell));
            const Offset center = nnf.offset(x, y);
            Offset best = center;
            double best_dist = nnf.distance(x, y);
            for (const double radius : radii) {
                const long jx = std::lround(radius * rng.next_signed_unit());
                const long jy = std::lround(radius * rng.next_signed_unit());
                const int tx = std::clamp(x + center.dx + static_cast<int>(jx), 0,
                                          grid.target_x - 1);
                const int ty = std::clamp(y + center.dy + static_cast<int>(jy), 0,
                                          grid.target_y - 1);
                const Offset candidate{tx - x, ty - y};
                if (candidate == best) continue;
                const double d = patch_distance(input, reference, {x, y}, candidate, patch);
                if (d < best_dist) {
                    best_dist = d;
                    best = candidate;
                }
            }
            nnf.set_match(x, y, best, best_dist);
        }
    }
}

NearestNeighborField compute_nnf(const ImageRgb& input, const ImageRgb& reference,
                                 const PatchMatchParams& params) {
    check_search_params(params);
    NearestNeighborField nnf = init_nnf(input, reference, params);
    for (int round = 0; round < params.iterations; ++round) {
        propagate(nnf, input, reference,
                  round % 2 == 0 ? ScanDirection::forward : ScanDirection::backward);
        random_search(nnf, input, reference, params, round);
    }
    return nnf;
}

ImageRgb warp(const ImageRgb& reference, const NearestNeighborField& nnf) {
    const int patch = nnf.patch_size();
    const int out_w = nnf.cells_x() + patch - 1;
    const int out_h = nnf.cells_y() + patch - 1;

    ImageRgb sums(out_w, out_h);
    ImagePlane counts(out_w, out_h);
    for (int cy = 0; cy < nnf.cells_y(); ++cy) {
        for (int cx = 0; cx < nnf.cells_x(); ++cx) {
            const Offset offset = nnf.offset(cx, cy);
            const int bx = cx + offset.dx;
            const int by = cy + offset.dy;
            for (int y = 0; y < patch; ++y) {
                for (int x = 0; x < patch; ++x) {
                    for (int c = 0; c < 3; ++c)
                        sums.channel(c).at(cx + x, cy + y) +=
                            reference.channel(c).at(bx + x, by + y);
                    counts.at(cx + x, cy + y) += 1.0;
                }
            }
        }
    }
    ImageRgb out(out_w, out_h);
    for (std::size_t i = 0; i < counts.pixel_count(); ++i)
        for (int c = 0; c < 3; ++c) out.channel(c)[i] = sums.channel(c)[i] / counts[i];
    return out;
}

std::vector<double> search_radii(double max_radius, double decay) {
    std::vector<double> radii;
    for (double r = max_radius; r >= 1.0; r *= decay) radii.push_back(r);
    return radii;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_nnf(const NearestNeighborField& nnf, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open NNF sidecar for writing: " + path.string());
        out.write("NNF1", 4);
        put_u32(out, static_cast<std::uint32_t>(nnf.cells_x()));
        put_u32(out, static_cast<std::uint32_t>(nnf.cells_y()));
        put_u32(out, static_cast<std::uint32_t>(nnf.patch_size()));
        for (int y = 0; y < nnf.cells_y(); ++y) {
            for (int x = 0; x < nnf.cells_x(); ++x) {
                const Offset o = nnf.offset(x, y);
                put_u32(out, static_cast<std::uint32_t>(o.dx));
                put_u32(out, static_cast<std::uint32_t>(o.dy));
            }
        }
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("failed writing NNF sidecar: " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot write NNF sidecar: " + path.string());
    }
}

NearestNeighborField read_nnf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open NNF sidecar: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NNF1", 4) != 0)
        throw IoError("not an NNF sidecar (bad magic): " + path.string());
    const std::uint32_t cells_x = get_u32(in);
    const std::uint32_t cells_y = get_u32(in);
    const std::uint32_t patch = get_u32(in);
    if (!in || cells_x == 0 || cells_y == 0 || patch == 0)
        throw IoError("corrupt NNF sidecar header: " + path.string());

    NearestNeighborField nnf(static_cast<int>(cells_x), static_cast<int>(cells_y),
                             static_cast<int>(patch));
    for (std::uint32_t y = 0; y < cells_y; ++y) {
        for (std::uint32_t x = 0; x < cells_x; ++x) {
            const std::int32_t dx = static_cast<std::int32_t>(get_u32(in));
            const std::int32_t dy = static_cast<std::int32_t>(get_u32(in));
            nnf.set_match(static_cast<int>(x), static_cast<int>(y), {dx, dy}, 0.0);
        }
    }
    if (!in) throw IoError("truncated NNF sidecar: " + path.string());
    return nnf;
}

}  // namespace relit
