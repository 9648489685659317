#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gspcd/core.hpp"

namespace gspcd::detail {

/// Sorts `values` and returns the median: the middle order statistic for odd
/// length, the mean of the two middle order statistics for even length.
inline double median_inplace(std::vector<double>& values) {
    if (values.empty())
        throw ArgumentError("median: empty sequence");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

/// Number of samples trimmed from each end: m = floor((N-1) * alpha).
inline int trim_count(int n, double alpha) {
    return static_cast<int>(std::floor((n - 1) * alpha));
}

/// Mean of the order statistics that remain after discarding the m smallest
/// and m largest samples. Expects m >= 1; the m == 0 case is the plain mean
/// and callers take that path directly so the two agree bit for bit.
inline double trimmed_mean_inplace(std::vector<double>& values, int m) {
    const int n = static_cast<int>(values.size());
    const int kept = n - 2 * m;
    if (m < 1 || kept < 1)
        throw ArgumentError("trimmed mean: trim count " + std::to_string(m) +
                            " leaves no samples out of " + std::to_string(n));
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (int i = m; i < n - m; ++i) acc += values[i];
    return acc / kept;
}

struct MeanStd {
    double mean = 0.0;
    double std_dev = 0.0;
};

/// Sample mean and sample standard deviation (divisor Q-1). A single-value
/// span gets std_dev = 0.
inline MeanStd sample_mean_stddev(std::span<const float> values) {
    const std::size_t q = values.size();
    if (q == 0)
        throw ArgumentError("sample_mean_stddev: empty input");
    double acc = 0.0;
    for (float v : values) acc += v;
    const double mean = acc / static_cast<double>(q);
    if (q == 1) return {mean, 0.0};
    double ss = 0.0;
    for (float v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(q - 1))};
}

/// Gaussian elimination with partial pivoting on a dense n x n system.
/// `matrix` is row-major. Throws on an exactly singular pivot.
inline std::vector<double> solve_linear(int n, std::vector<double> matrix,
                                        std::vector<double> rhs) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(matrix[r * n + col]) > std::abs(matrix[pivot * n + col]))
                pivot = r;
        if (matrix[pivot * n + col] == 0.0)
            throw ArgumentError("solve_linear: singular system");
        if (pivot != col) {
            for (int c = col; c < n; ++c)
                std::swap(matrix[pivot * n + c], matrix[col * n + c]);
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = matrix[r * n + col] / matrix[col * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) matrix[r * n + c] -= f * matrix[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= matrix[r * n + c] * x[c];
        x[r] = acc / matrix[r * n + r];
    }
    return x;
}

}  // namespace gspcd::detail
