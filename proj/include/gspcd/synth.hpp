#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gspcd/core.hpp"

namespace gspcd {

namespace detail {

/// splitmix64: a tiny, portable generator so identical seeds give identical
/// scenes on every platform. next_unit() draws a uniform double in [0, 1)
/// from the top 53 bits.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform with zero mean and the requested standard deviation.
    double next_centered(double std_dev) {
        return (next_unit() - 0.5) * 3.4641016151377544 * std_dev;  // sqrt(12)
    }

private:
    std::uint64_t state_;
};

/// Mean filter with a centered (2*radius+1) window per axis; windows are
/// clipped at the borders and normalized by the in-bounds count.
inline std::vector<double> box_blur(const std::vector<double>& in, int rows,
                                    int cols, int radius) {
    if (radius <= 0) return in;
    std::vector<double> tmp(in.size(), 0.0);
    std::vector<double> prefix;
    for (int r = 0; r < rows; ++r) {
        prefix.assign(static_cast<std::size_t>(cols) + 1, 0.0);
        for (int c = 0; c < cols; ++c)
            prefix[static_cast<std::size_t>(c) + 1] =
                prefix[static_cast<std::size_t>(c)] +
                in[static_cast<std::size_t>(r) * cols + c];
        for (int c = 0; c < cols; ++c) {
            const int lo = std::max(0, c - radius);
            const int hi = std::min(cols - 1, c + radius);
            tmp[static_cast<std::size_t>(r) * cols + c] =
                (prefix[static_cast<std::size_t>(hi) + 1] -
                 prefix[static_cast<std::size_t>(lo)]) /
                (hi - lo + 1);
        }
    }
    std::vector<double> out(in.size(), 0.0);
    for (int c = 0; c < cols; ++c) {
        prefix.assign(static_cast<std::size_t>(rows) + 1, 0.0);
        for (int r = 0; r < rows; ++r)
            prefix[static_cast<std::size_t>(r) + 1] =
                prefix[static_cast<std::size_t>(r)] +
                tmp[static_cast<std::size_t>(r) * cols + c];
        for (int r = 0; r < rows; ++r) {
            const int lo = std::max(0, r - radius);
            const int hi = std::min(rows - 1, r + radius);
            out[static_cast<std::size_t>(r) * cols + c] =
                (prefix[static_cast<std::size_t>(hi) + 1] -
                 prefix[static_cast<std::size_t>(lo)]) /
                (hi - lo + 1);
        }
    }
    return out;
}

}  // namespace detail

/// A raised-amplitude square blob deployed in exactly one image of the stack.
struct SynthTarget {
    int image_index = 0;
    double row = 0.0;
    double col = 0.0;
    int size_px = 10;             // side of the full-amplitude core
    double amplitude_boost = 0.5; // added on top of clutter; rim gets half
};

struct SynthConfig {
    int rows = 0;
    int cols = 0;
    int n_images = 8;
    std::uint64_t seed = 0;
    double clutter_mean = 0.14;
    double clutter_std = 0.07;
    double clutter_correlation_px = 3.0;  // box-blur radius for the clutter field
    double temporal_jitter_std = 0.01;
    double pixel_spacing_m = kDefaultPixelSpacingM;
    std::vector<SynthTarget> targets;

    void validate() const {
        if (rows < 1 || cols < 1)
            throw ArgumentError("SynthConfig: rows and cols must be positive");
        if (n_images < 2)
            throw ArgumentError("SynthConfig: n_images must be >= 2");
        if (!(clutter_mean >= 0.0) || !(clutter_std >= 0.0))
            throw ArgumentError("SynthConfig: clutter mean and std must be >= 0");
        if (!(clutter_correlation_px >= 0.0))
            throw ArgumentError("SynthConfig: clutter_correlation_px must be >= 0");
        if (!(temporal_jitter_std >= 0.0))
            throw ArgumentError("SynthConfig: temporal_jitter_std must be >= 0");
        if (!(pixel_spacing_m > 0.0))
            throw ArgumentError("SynthConfig: pixel_spacing_m must be positive");
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const SynthTarget& t = targets[i];
            if (t.image_index < 0 || t.image_index >= n_images)
                throw ArgumentError("SynthConfig: target " + std::to_string(i) +
                                    " image_index out of range");
            if (!(t.row >= 0.0) || t.row >= rows || !(t.col >= 0.0) ||
                t.col >= cols)
                throw ArgumentError("SynthConfig: target " + std::to_string(i) +
                                    " position out of bounds");
            if (t.size_px < 1)
                throw ArgumentError("SynthConfig: target " + std::to_string(i) +
                                    " size_px must be >= 1");
            if (!(t.amplitude_boost > 0.0))
                throw ArgumentError("SynthConfig: target " + std::to_string(i) +
                                    " amplitude_boost must be positive");
        }
    }

    /// Desk-scale stand-in for the full data regime: a 300x200 scene, a stack
    /// of 8, and 25 targets on a 5x5 grid (spacing well above 50 m) deployed
    /// in stack images 0 and 1. Image 0 doubles as the surveillance image.
    /// Blob side 6 px keeps the target area a sub-percent fraction of the
    /// scene so the difference-image statistics stay clutter-dominated, as
    /// they are at full scale.
    static SynthConfig default_scenario(std::uint64_t seed = 42) {
        SynthConfig c;
        c.rows = 300;
        c.cols = 200;
        c.n_images = 8;
        c.seed = seed;
        for (int gi = 0; gi < 5; ++gi)
            for (int gj = 0; gj < 5; ++gj)
                for (int image : {0, 1})
                    c.targets.push_back(
                        {image, 30.0 + 60.0 * gi, 20.0 + 40.0 * gj, 6, 0.5});
        return c;
    }
};

struct SynthScene {
    ImageStack stack;
    std::vector<std::vector<Target>> targets_per_image;
    Image clutter;  // the shared jitter-free ground truth
};

/// Builds one shared smoothed clutter field, then each stack image as
/// clutter + per-image zero-mean jitter clamped at 0, plus the designated
/// target blobs. Identical configs produce bit-identical scenes.
inline SynthScene generate(const SynthConfig& config) {
    config.validate();
    const int rows = config.rows;
    const int cols = config.cols;
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    detail::SplitMix64 rng(config.seed);

    std::vector<double> white(n);
    for (double& v : white) v = rng.next_unit();
    const int radius = static_cast<int>(std::lround(config.clutter_correlation_px));
    std::vector<double> smooth = detail::box_blur(white, rows, cols, radius);

    double mean = 0.0;
    for (double v : smooth) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : smooth) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double scale = var > 0.0 ? config.clutter_std / std::sqrt(var) : 0.0;

    std::vector<double> clutter(n);
    std::vector<float> clutter_px(n);
    for (std::size_t i = 0; i < n; ++i) {
        clutter[i] = std::max(0.0, config.clutter_mean + (smooth[i] - mean) * scale);
        clutter_px[i] = static_cast<float>(clutter[i]);
    }

    std::vector<Image> images;
    images.reserve(static_cast<std::size_t>(config.n_images));
    std::vector<std::vector<Target>> targets_per_image(
        static_cast<std::size_t>(config.n_images));

    for (int img = 0; img < config.n_images; ++img) {
        std::vector<double> value(n);
        for (std::size_t i = 0; i < n; ++i)
            value[i] = std::max(
                0.0, clutter[i] + rng.next_centered(config.temporal_jitter_std));
        for (std::size_t ti = 0; ti < config.targets.size(); ++ti) {
            const SynthTarget& t = config.targets[ti];
            if (t.image_index != img) continue;
            const int cr = static_cast<int>(std::lround(t.row));
            const int cc = static_cast<int>(std::lround(t.col));
            const int r0 = cr - t.size_px / 2;
            const int c0 = cc - t.size_px / 2;
            // full-amplitude core plus a 1-pixel half-amplitude rim
            for (int r = r0 - 1; r < r0 + t.size_px + 1; ++r) {
                if (r < 0 || r >= rows) continue;
                for (int c = c0 - 1; c < c0 + t.size_px + 1; ++c) {
                    if (c < 0 || c >= cols) continue;
                    const bool core = r >= r0 && r < r0 + t.size_px && c >= c0 &&
                                      c < c0 + t.size_px;
                    value[static_cast<std::size_t>(r) * cols + c] +=
                        core ? t.amplitude_boost : t.amplitude_boost / 2.0;
                }
            }
            targets_per_image[static_cast<std::size_t>(img)].push_back(
                {"t" + std::to_string(ti), t.row, t.col});
        }
        std::vector<float> px(n);
        for (std::size_t i = 0; i < n; ++i) px[i] = static_cast<float>(value[i]);
        images.emplace_back(rows, cols, std::move(px), config.pixel_spacing_m);
    }

    return SynthScene{ImageStack(std::move(images)),
                      std::move(targets_per_image),
                      Image(rows, cols, std::move(clutter_px),
                            config.pixel_spacing_m)};
}

}  // namespace gspcd
