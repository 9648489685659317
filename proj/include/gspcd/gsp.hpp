#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gspcd/core.hpp"
#include "gspcd/detail/numeric.hpp"
#include "gspcd/parallel.hpp"

namespace gspcd {

/// Per-pixel estimator selection for predict_scene.
struct EstimatorKind {
    enum class Method { ar_model, trimmed_mean, median, mean, intensity_mean };

    Method method = Method::median;
    double alpha = 0.3;        // trimmed_mean only
    int ar_order = 1;          // ar_model; the CLI surface fixes this to 1
    bool ar_centered = false;  // ar_model: fit and forecast on mean-centered samples

    static EstimatorKind ar(bool centered = false) {
        EstimatorKind k;
        k.method = Method::ar_model;
        k.ar_centered = centered;
        return k;
    }
    static EstimatorKind trimmed(double alpha) {
        EstimatorKind k;
        k.method = Method::trimmed_mean;
        k.alpha = alpha;
        return k;
    }
    static EstimatorKind median() { return {Method::median, 0.0, 1, false}; }
    static EstimatorKind mean() { return {Method::mean, 0.0, 1, false}; }
    static EstimatorKind intensity_mean() {
        return {Method::intensity_mean, 0.0, 1, false};
    }

    void validate() const {
        if (method == Method::trimmed_mean && !(alpha >= 0.0 && alpha < 0.5))
            throw ArgumentError("estimator: alpha must be in [0, 0.5)");
        if (method == Method::ar_model && ar_order < 1)
            throw ArgumentError("estimator: AR order must be >= 1");
    }

    const char* name() const {
        switch (method) {
            case Method::ar_model: return "ar";
            case Method::trimmed_mean: return "trimmed";
            case Method::median: return "median";
            case Method::mean: return "mean";
            case Method::intensity_mean: return "intensity";
        }
        return "?";
    }
};

inline double mean_estimate(const PixelSeries& series) {
    if (series.empty()) throw ArgumentError("mean_estimate: empty series");
    return std::accumulate(series.begin(), series.end(), 0.0) /
           static_cast<double>(series.size());
}

inline double median_estimate(const PixelSeries& series) {
    if (series.empty()) throw ArgumentError("median_estimate: empty series");
    PixelSeries tmp(series);
    return detail::median_inplace(tmp);
}

/// Mean of the sorted samples after discarding the m smallest and m largest,
/// with m = floor((N-1) * alpha) and normalization 1/(N - 2m). alpha = 0 is
/// exactly the sample mean.
inline double trimmed_mean_estimate(const PixelSeries& series, double alpha) {
    if (series.empty()) throw ArgumentError("trimmed_mean_estimate: empty series");
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw ArgumentError("trimmed_mean_estimate: alpha must be in [0, 0.5)");
    const int n = static_cast<int>(series.size());
    const int m = detail::trim_count(n, alpha);
    if (m == 0) return mean_estimate(series);
    if (n - 2 * m < 1)
        throw ArgumentError("trimmed_mean_estimate: trimming removes every sample");
    PixelSeries tmp(series);
    return detail::trimmed_mean_inplace(tmp, m);
}

/// Root mean square of the samples: sqrt((1/N) sum y[n]^2).
inline double intensity_mean_estimate(const PixelSeries& series) {
    if (series.empty()) throw ArgumentError("intensity_mean_estimate: empty series");
    double acc = 0.0;
    for (double v : series) acc += v * v;
    return std::sqrt(acc / static_cast<double>(series.size()));
}

/// Biased sample autocorrelation of the raw (non-centered) samples:
/// r[k] = (1/N) * sum_{n=0}^{N-1-k} y[n] * y[n+k], for k = 0..max_lag.
inline std::vector<double> sample_autocorrelation(const PixelSeries& series,
                                                  int max_lag) {
    const int n = static_cast<int>(series.size());
    if (n < 1) throw ArgumentError("sample_autocorrelation: empty series");
    if (max_lag < 0)
        throw ArgumentError("sample_autocorrelation: max_lag must be >= 0");
    if (max_lag >= n)
        throw ArgumentError("sample_autocorrelation: max_lag " +
                            std::to_string(max_lag) + " must be < N = " +
                            std::to_string(n));
    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (int i = 0; i + k < n; ++i) acc += series[i] * series[i + k];
        r[static_cast<std::size_t>(k)] = acc / n;
    }
    return r;
}

/// Yule-Walker fit of an AR(p) model. coefficients[k-1] holds a_hat[k];
/// autocorr holds r[0..p]; mean is nonzero only for a centered fit.
struct ArFit {
    std::vector<double> coefficients;
    std::vector<double> autocorr;
    double mean = 0.0;

    int order() const { return static_cast<int>(coefficients.size()); }
};

/// Solves the Toeplitz system R a = -[r[1]..r[p]] built from the biased
/// autocorrelation of the samples (mean-centered first when `centered`).
/// An identically zero autocorrelation (r[0] = 0) yields all-zero
/// coefficients rather than an error, so whole-image runs survive flat
/// padded regions.
inline ArFit fit_ar(const PixelSeries& series, int p, bool centered = false) {
    const int n = static_cast<int>(series.size());
    if (p < 1) throw ArgumentError("fit_ar: order must be >= 1");
    if (n <= p)
        throw ArgumentError("fit_ar: need N > p, got N = " + std::to_string(n) +
                            ", p = " + std::to_string(p));
    ArFit fit;
    const PixelSeries* samples = &series;
    PixelSeries centered_buf;
    if (centered) {
        fit.mean = mean_estimate(series);
        centered_buf.resize(series.size());
        for (std::size_t i = 0; i < series.size(); ++i)
            centered_buf[i] = series[i] - fit.mean;
        samples = &centered_buf;
    }
    fit.autocorr = sample_autocorrelation(*samples, p);
    fit.coefficients.assign(static_cast<std::size_t>(p), 0.0);
    if (fit.autocorr[0] == 0.0) return fit;

    std::vector<double> matrix(static_cast<std::size_t>(p) * p, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(p), 0.0);
    for (int r = 0; r < p; ++r) {
        for (int c = 0; c < p; ++c)
            matrix[static_cast<std::size_t>(r) * p + c] =
                fit.autocorr[static_cast<std::size_t>(std::abs(r - c))];
        rhs[static_cast<std::size_t>(r)] = -fit.autocorr[static_cast<std::size_t>(r) + 1];
    }
    fit.coefficients = detail::solve_linear(p, std::move(matrix), std::move(rhs));
    return fit;
}

/// One-step-ahead forecast:
/// y_hat[N+1] = mean - sum_{k=1..p} a_hat[k] * (y[N+1-k] - mean), mean = 0 raw.
/// Unlike the order-statistic estimators this depends on the stack order of
/// the series (the last samples feed the prediction).
inline double ar_forecast(const PixelSeries& series, const ArFit& fit) {
    const int p = fit.order();
    if (p < 1) throw ArgumentError("ar_forecast: fit has no coefficients");
    const int n = static_cast<int>(series.size());
    if (n < p)
        throw ArgumentError("ar_forecast: series shorter than the model order");
    double acc = 0.0;
    for (int k = 1; k <= p; ++k)
        acc -= fit.coefficients[static_cast<std::size_t>(k) - 1] *
               (series[static_cast<std::size_t>(n - k)] - fit.mean);
    return fit.mean + acc;
}

namespace detail {

/// Allocation-free AR(1) forecast for the per-pixel hot loop. Arithmetic
/// matches fit_ar + ar_forecast operation for operation.
inline double ar1_forecast(const PixelSeries& y, bool centered) {
    const int n = static_cast<int>(y.size());
    double mean = 0.0;
    if (centered)
        mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double r0 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = y[static_cast<std::size_t>(i)] - mean;
        r0 += v * v;
    }
    r0 /= n;
    if (r0 == 0.0) return mean;
    double r1 = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        r1 += (y[static_cast<std::size_t>(i)] - mean) *
              (y[static_cast<std::size_t>(i) + 1] - mean);
    r1 /= n;
    const double a = (-r1) / r0;
    return mean + (0.0 - a * (y[static_cast<std::size_t>(n) - 1] - mean));
}

}  // namespace detail

/// Applies the chosen estimator at every pixel position of the stack. Rows
/// may be partitioned across `threads` workers; each output pixel depends on
/// its own series only, so the result is identical for every thread count.
inline Image predict_scene(const ImageStack& stack, const EstimatorKind& kind,
                           int threads = 1) {
    kind.validate();
    if (kind.method == EstimatorKind::Method::ar_model &&
        static_cast<int>(stack.size()) <= kind.ar_order)
        throw ArgumentError("predict_scene: stack size must exceed the AR order");
    const int rows = stack.rows();
    const int cols = stack.cols();
    const int n = static_cast<int>(stack.size());
    const int m_trim = kind.method == EstimatorKind::Method::trimmed_mean
                           ? detail::trim_count(n, kind.alpha)
                           : 0;
    std::vector<float> out(static_cast<std::size_t>(rows) * cols, 0.0f);

    parallel_for_rows(rows, threads, [&](int row_begin, int row_end) {
        PixelSeries buf(static_cast<std::size_t>(n));
        for (int r = row_begin; r < row_end; ++r) {
            for (int c = 0; c < cols; ++c) {
                extract_series_into(stack, r, c, buf);
                double value = 0.0;
                try {
                    switch (kind.method) {
                        case EstimatorKind::Method::ar_model:
                            value = kind.ar_order == 1
                                        ? detail::ar1_forecast(buf, kind.ar_centered)
                                        : ar_forecast(buf, fit_ar(buf, kind.ar_order,
                                                                  kind.ar_centered));
                            break;
                        case EstimatorKind::Method::trimmed_mean:
                            value = m_trim == 0
                                        ? mean_estimate(buf)
                                        : detail::trimmed_mean_inplace(buf, m_trim);
                            break;
                        case EstimatorKind::Method::median:
                            value = detail::median_inplace(buf);
                            break;
                        case EstimatorKind::Method::mean:
                            value = mean_estimate(buf);
                            break;
                        case EstimatorKind::Method::intensity_mean:
                            value = intensity_mean_estimate(buf);
                            break;
                    }
                } catch (const Error& e) {
                    throw ArgumentError(std::string(e.what()) + " at pixel (" +
                                        std::to_string(r) + ", " +
                                        std::to_string(c) + ")");
                }
                out[static_cast<std::size_t>(r) * cols + c] =
                    static_cast<float>(value);
            }
        }
    });
    return Image(rows, cols, std::move(out), stack.pixel_spacing_m());
}

}  // namespace gspcd
