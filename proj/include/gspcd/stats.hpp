#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gspcd/core.hpp"
#include "gspcd/detail/numeric.hpp"

namespace gspcd {

/// Descriptive statistics of an image. std_dev is the sample standard
/// deviation (divisor Q-1); skewness and kurtosis use biased central moments
/// (divisor Q); kurtosis is non-excess, so a Gaussian scores 3.
struct DescriptiveStats {
    double average = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

inline DescriptiveStats describe(const Image& image) {
    const auto px = image.pixels();
    const std::size_t q = px.size();
    if (q < 2) throw ArgumentError("describe: need at least 2 pixels");
    double acc = 0.0;
    for (float v : px) acc += v;
    const double mean = acc / static_cast<double>(q);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (float v : px) {
        const double d = v - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const double m2 = s2 / static_cast<double>(q);
    if (m2 == 0.0)
        throw ArgumentError("describe: zero variance, skewness and kurtosis undefined");
    DescriptiveStats out;
    out.average = mean;
    out.std_dev = std::sqrt(s2 / static_cast<double>(q - 1));
    out.skewness = (s3 / static_cast<double>(q)) / (m2 * std::sqrt(m2));
    out.kurtosis = (s4 / static_cast<double>(q)) / (m2 * m2);
    return out;
}

/// Marks the (2*half_window+1)^2 square centered at each target's rounded
/// position, clipped to the image bounds. True means excluded.
inline BinaryMask exclusion_mask(std::span<const Target> targets, int rows,
                                 int cols, int half_window) {
    if (half_window < 0)
        throw ArgumentError("exclusion_mask: half_window must be >= 0");
    if (rows <= 0 || cols <= 0)
        throw ArgumentError("exclusion_mask: rows and cols must be positive");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(rows) * cols, 0);
    for (const Target& t : targets) {
        const int cr = static_cast<int>(std::lround(t.row));
        const int cc = static_cast<int>(std::lround(t.col));
        const int r0 = std::max(0, cr - half_window);
        const int r1 = std::min(rows - 1, cr + half_window);
        const int c0 = std::max(0, cc - half_window);
        const int c1 = std::min(cols - 1, cc + half_window);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                bits[static_cast<std::size_t>(r) * cols + c] = 1;
    }
    return BinaryMask(rows, cols, std::move(bits));
}

/// Goodness-of-fit between an interest and a predicted image over the
/// non-excluded pixels: MSE, MAPE (skipping pixels whose interest value is
/// exactly zero), and the median absolute error.
struct QualityMeasures {
    double mse = 0.0;
    double mape = 0.0;
    double mdae = 0.0;
    std::size_t pixels_used = 0;
};

inline QualityMeasures quality(const Image& interest, const Image& predicted,
                               const BinaryMask& excluded) {
    if (!interest.same_shape(predicted))
        throw ArgumentError("quality: interest and predicted dimensions differ");
    if (excluded.rows() != interest.rows() || excluded.cols() != interest.cols())
        throw ArgumentError("quality: exclusion mask dimensions differ");
    const auto x = interest.pixels();
    const auto xh = predicted.pixels();
    const auto skip = excluded.bits();
    std::vector<double> abs_err;
    abs_err.reserve(x.size());
    double se = 0.0;
    double ape = 0.0;
    std::size_t used = 0;
    std::size_t mape_terms = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (skip[i]) continue;
        const double e = static_cast<double>(x[i]) - static_cast<double>(xh[i]);
        const double ae = std::abs(e);
        se += e * e;
        abs_err.push_back(ae);
        ++used;
        if (x[i] != 0.0f) {
            ape += ae / std::abs(static_cast<double>(x[i]));
            ++mape_terms;
        }
    }
    if (used == 0)
        throw ArgumentError("quality: every pixel is excluded");
    QualityMeasures out;
    out.mse = se / static_cast<double>(used);
    out.mape = mape_terms ? ape / static_cast<double>(mape_terms) : 0.0;
    out.mdae = detail::median_inplace(abs_err);
    out.pixels_used = used;
    return out;
}

}  // namespace gspcd
