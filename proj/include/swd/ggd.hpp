#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace swd {

/// Zero-mean generalized Gaussian
///   f(x) = shape / (2 scale Gamma(1/shape)) exp(-|x / scale|^shape)
struct GgdParams {
    double scale = 1.0;
    double shape = 2.0;
    double log_likelihood = 0.0;  // at the fitted optimum; 0 for hand-built params
};

struct GgdSolverOptions {
    double shape_min = 0.05;
    double shape_max = 20.0;
    double tolerance = 1e-8;  // on |delta shape|
    int max_iterations = 200;
};

/// Solver diagnostics alongside the estimate.
struct GgdFit {
    GgdParams params;
    double initial_shape = 0.0;  // moment (kurtosis) estimate used as the start point
    int iterations = 0;
    bool clamped_low = false;
    bool clamped_high = false;
};

double ggd_logpdf(double x, const GgdParams& p);
double ggd_log_likelihood(std::span<const double> data, double scale, double shape);

/// Variance of the distribution: scale^2 Gamma(3/shape) / Gamma(1/shape).
double ggd_variance(const GgdParams& p);

/// Kurtosis Gamma(5/s) Gamma(1/s) / Gamma(3/s)^2, decreasing in the shape.
double ggd_kurtosis(double shape);

/// Maximizer of the likelihood in the scale for a fixed shape:
///   (shape / n * sum |x|^shape)^(1 / shape)
double profile_scale(std::span<const double> data, double shape);

/// Maximum-likelihood fit treating `data` as zero-mean i.i.d. draws. Throws
/// DegenerateData when fewer than two values are given or all values are
/// identical, and NoConvergence if the shape iteration exceeds its cap.
GgdFit fit_ggd(std::span<const double> data, const GgdSolverOptions& opts = {});

inline GgdParams fit_ggd_mle(std::span<const double> data, const GgdSolverOptions& opts = {}) {
    return fit_ggd(data, opts).params;
}

/// n draws sign * scale * G^(1/shape), G ~ Gamma(1/shape, 1). Deterministic per seed.
std::vector<double> sample_ggd(const GgdParams& p, std::size_t n, std::uint64_t seed);

}  // namespace swd
