#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gspcd/core.hpp"
#include "gspcd/detail/numeric.hpp"

namespace gspcd {

/// Pixel-wise surveillance - reference. New targets in the surveillance image
/// appear as positive excursions.
using DifferenceImage = Image;

inline DifferenceImage difference(const Image& surveillance,
                                  const Image& reference) {
    if (!surveillance.same_shape(reference))
        throw ArgumentError("difference: image dimensions differ");
    const auto s = surveillance.pixels();
    const auto r = reference.pixels();
    std::vector<float> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] - r[i];
    return DifferenceImage(surveillance.rows(), surveillance.cols(),
                           std::move(out), surveillance.pixel_spacing_m());
}

/// Threshold derived from the difference-image statistics:
/// lambda = mu_hat + c_constant * sigma_hat.
struct ThresholdSpec {
    double c_constant;
    double mu_hat;
    double sigma_hat;
    double lambda;

    ThresholdSpec(double c, double mu, double sigma)
        : c_constant(c), mu_hat(mu), sigma_hat(sigma), lambda(mu + c * sigma) {
        if (!(sigma >= 0.0))
            throw ArgumentError("ThresholdSpec: sigma_hat must be >= 0");
    }
};

/// mu_hat and sigma_hat are the sample mean and sample standard deviation
/// (divisor Q-1) over all difference pixels, target regions included.
inline ThresholdSpec compute_threshold(const DifferenceImage& diff,
                                       double c_constant) {
    const auto ms = detail::sample_mean_stddev(diff.pixels());
    return ThresholdSpec(c_constant, ms.mean, ms.std_dev);
}

/// One-sided positive test: true where the difference pixel exceeds lambda.
inline BinaryMask apply_threshold(const DifferenceImage& diff,
                                  const ThresholdSpec& spec) {
    const auto px = diff.pixels();
    std::vector<std::uint8_t> bits(px.size(), 0);
    for (std::size_t i = 0; i < px.size(); ++i)
        bits[i] = static_cast<double>(px[i]) > spec.lambda ? 1 : 0;
    return BinaryMask(diff.rows(), diff.cols(), std::move(bits));
}

namespace detail {

enum class MorphOp { erode, dilate };

// One 1-D pass of a separable square structuring element. Pixels outside the
// image are false for both operations (zero padding).
inline std::vector<std::uint8_t> morph_pass(const std::vector<std::uint8_t>& in,
                                            int rows, int cols, int half,
                                            bool horizontal, MorphOp op) {
    std::vector<std::uint8_t> out(in.size(), 0);
    const int extent = horizontal ? cols : rows;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int pos = horizontal ? c : r;
            std::uint8_t v;
            if (op == MorphOp::erode) {
                v = 1;
                if (pos - half < 0 || pos + half >= extent) {
                    v = 0;  // window leaves the image: padding is false
                } else {
                    for (int d = -half; d <= half; ++d) {
                        const std::size_t idx =
                            horizontal
                                ? static_cast<std::size_t>(r) * cols + (c + d)
                                : static_cast<std::size_t>(r + d) * cols + c;
                        if (!in[idx]) {
                            v = 0;
                            break;
                        }
                    }
                }
            } else {
                v = 0;
                const int lo = std::max(-half, -pos);
                const int hi = std::min(half, extent - 1 - pos);
                for (int d = lo; d <= hi; ++d) {
                    const std::size_t idx =
                        horizontal ? static_cast<std::size_t>(r) * cols + (c + d)
                                   : static_cast<std::size_t>(r + d) * cols + c;
                    if (in[idx]) {
                        v = 1;
                        break;
                    }
                }
            }
            out[static_cast<std::size_t>(r) * cols + c] = v;
        }
    }
    return out;
}

inline void check_kernel(int kernel, const char* op) {
    if (kernel < 1 || kernel % 2 == 0)
        throw ArgumentError(std::string(op) + ": kernel must be odd and >= 1, got " +
                            std::to_string(kernel));
}

}  // namespace detail

/// True iff every pixel of the centered kernel x kernel window is true;
/// windows extending beyond the border see false outside.
inline BinaryMask erode(const BinaryMask& mask, int kernel) {
    detail::check_kernel(kernel, "erode");
    if (kernel == 1) return mask;
    const int half = kernel / 2;
    std::vector<std::uint8_t> bits(mask.bits().begin(), mask.bits().end());
    bits = detail::morph_pass(bits, mask.rows(), mask.cols(), half, true,
                              detail::MorphOp::erode);
    bits = detail::morph_pass(bits, mask.rows(), mask.cols(), half, false,
                              detail::MorphOp::erode);
    return BinaryMask(mask.rows(), mask.cols(), std::move(bits));
}

/// True iff any pixel of the centered kernel x kernel window is true.
inline BinaryMask dilate(const BinaryMask& mask, int kernel) {
    detail::check_kernel(kernel, "dilate");
    if (kernel == 1) return mask;
    const int half = kernel / 2;
    std::vector<std::uint8_t> bits(mask.bits().begin(), mask.bits().end());
    bits = detail::morph_pass(bits, mask.rows(), mask.cols(), half, true,
                              detail::MorphOp::dilate);
    bits = detail::morph_pass(bits, mask.rows(), mask.cols(), half, false,
                              detail::MorphOp::dilate);
    return BinaryMask(mask.rows(), mask.cols(), std::move(bits));
}

/// Erosion followed by dilation with the same structuring element; removes
/// connected regions smaller than the element.
inline BinaryMask opening(const BinaryMask& mask, int kernel) {
    detail::check_kernel(kernel, "opening");
    return dilate(erode(mask, kernel), kernel);
}

/// Per-pixel component labels under 4- or 8-connectivity: two-pass labeling
/// with union-find. 0 is background; components are numbered from 1 in
/// raster order of their first pixel.
inline std::vector<std::int32_t> label_components(const BinaryMask& mask,
                                                  int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw ArgumentError("label_components: connectivity must be 4 or 8");
    const int rows = mask.rows();
    const int cols = mask.cols();
    const auto bits = mask.bits();
    const bool diag = connectivity == 8;

    std::vector<std::int32_t> label(bits.size(), 0);
    std::vector<std::int32_t> parent(1, 0);  // parent[l] for labels l >= 1

    auto find = [&parent](std::int32_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&parent, &find](std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (a > b) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        return a;
    };

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            if (!bits[i]) continue;
            std::int32_t merged = 0;
            const auto consider = [&](std::size_t j) {
                if (!label[j]) return;
                merged = merged ? unite(merged, label[j]) : find(label[j]);
            };
            if (c > 0) consider(i - 1);
            if (r > 0) {
                consider(i - static_cast<std::size_t>(cols));
                if (diag && c > 0) consider(i - static_cast<std::size_t>(cols) - 1);
                if (diag && c + 1 < cols)
                    consider(i - static_cast<std::size_t>(cols) + 1);
            }
            if (!merged) {
                merged = static_cast<std::int32_t>(parent.size());
                parent.push_back(merged);
            }
            label[i] = merged;
        }
    }

    // renumber roots densely in raster order of first occurrence
    std::vector<std::int32_t> dense(parent.size(), 0);
    std::int32_t next = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (!label[i]) continue;
        const std::int32_t root = find(label[i]);
        if (!dense[static_cast<std::size_t>(root)])
            dense[static_cast<std::size_t>(root)] = ++next;
        label[i] = dense[static_cast<std::size_t>(root)];
    }
    return label;
}

/// Maximal connected true-pixel sets under 4- or 8-connectivity. Output is
/// ordered by (min_row, min_col), with the raster position of each
/// component's first pixel as the tie-break.
inline std::vector<Detection> connected_components(const BinaryMask& mask,
                                                   int connectivity) {
    const int rows = mask.rows();
    const int cols = mask.cols();
    const std::vector<std::int32_t> label = label_components(mask, connectivity);

    struct Acc {
        std::int64_t count = 0;
        double sum_r = 0.0, sum_c = 0.0;
        int min_r = 0, min_c = 0, max_r = 0, max_c = 0;
        std::size_t first = 0;
    };
    std::vector<Acc> comps;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            if (!label[i]) continue;
            const std::size_t s = static_cast<std::size_t>(label[i]) - 1;
            if (s == comps.size()) comps.push_back({0, 0.0, 0.0, r, c, r, c, i});
            Acc& a = comps[s];
            ++a.count;
            a.sum_r += r;
            a.sum_c += c;
            a.min_r = std::min(a.min_r, r);
            a.min_c = std::min(a.min_c, c);
            a.max_r = std::max(a.max_r, r);
            a.max_c = std::max(a.max_c, c);
        }
    }

    std::sort(comps.begin(), comps.end(), [](const Acc& a, const Acc& b) {
        if (a.min_r != b.min_r) return a.min_r < b.min_r;
        if (a.min_c != b.min_c) return a.min_c < b.min_c;
        return a.first < b.first;
    });

    std::vector<Detection> out;
    out.reserve(comps.size());
    for (const Acc& a : comps) {
        Detection d;
        d.centroid_row = a.sum_r / static_cast<double>(a.count);
        d.centroid_col = a.sum_c / static_cast<double>(a.count);
        d.pixel_count = a.count;
        d.min_row = a.min_r;
        d.min_col = a.min_c;
        d.max_row = a.max_r;
        d.max_col = a.max_c;
        out.push_back(d);
    }
    return out;
}

/// One threshold point of a C sweep, with the detections it produced.
struct SweepPoint {
    ThresholdSpec threshold;
    std::vector<Detection> detections;
};

/// Runs threshold + morphology + component extraction once per C value,
/// computing the difference image and its statistics a single time.
inline std::vector<SweepPoint> detect_sweep(const Image& surveillance,
                                            const Image& reference,
                                            const CdaParams& params,
                                            std::span<const double> c_values) {
    params.validate();
    if (c_values.empty())
        throw ArgumentError("detect_sweep: empty C list");
    const DifferenceImage diff = difference(surveillance, reference);
    const auto ms = detail::sample_mean_stddev(diff.pixels());
    std::vector<SweepPoint> out;
    out.reserve(c_values.size());
    for (double c : c_values) {
        ThresholdSpec spec(c, ms.mean, ms.std_dev);
        BinaryMask m = apply_threshold(diff, spec);
        m = opening(m, params.opening_kernel);
        m = dilate(m, params.dilation_kernel);
        out.push_back({spec, connected_components(m, params.connectivity)});
    }
    return out;
}

/// Full pipeline: difference -> threshold at params.c_constant -> opening ->
/// dilation -> connected components.
inline std::vector<Detection> detect(const Image& surveillance,
                                     const Image& reference,
                                     const CdaParams& params) {
    const double c = params.c_constant;
    return detect_sweep(surveillance, reference, params, std::span(&c, 1))
        .front()
        .detections;
}

}  // namespace gspcd
