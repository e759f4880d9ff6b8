#include "swd/ggd.hpp"

#include "swd/error.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace swd {

namespace {

void check_params(const GgdParams& p) {
    if (!(p.scale > 0.0) || !(p.shape > 0.0) || !std::isfinite(p.scale) || !std::isfinite(p.shape)) {
        throw Error(ErrorCode::InvalidArgument, "GGD scale and shape must be positive and finite");
    }
}

// log|x| / max|x| for the nonzero entries; zeros contribute nothing to the
// power sums. Working on data normalized by its largest magnitude keeps
// |y|^shape in [0, 1] for every shape in the search range.
struct LogMagnitudes {
    std::vector<double> logs;
    double log_max = 0.0;
    std::size_t n = 0;
};

LogMagnitudes log_magnitudes(std::span<const double> data) {
    LogMagnitudes lm;
    lm.n = data.size();
    double max_abs = 0.0;
    for (const double x : data) max_abs = std::max(max_abs, std::abs(x));
    lm.log_max = std::log(max_abs);
    lm.logs.reserve(data.size());
    for (const double x : data) {
        if (x != 0.0) lm.logs.push_back(std::log(std::abs(x)) - lm.log_max);
    }
    return lm;
}

struct PowerSums {
    double s0 = 0.0;  // sum |y|^s
    double s1 = 0.0;  // sum |y|^s log|y|
    double s2 = 0.0;  // sum |y|^s log^2|y|
};

PowerSums power_sums(const LogMagnitudes& lm, double shape) {
    PowerSums ps;
    for (const double l : lm.logs) {
        const double w = std::exp(shape * l);
        ps.s0 += w;
        ps.s1 += w * l;
        ps.s2 += w * l * l;
    }
    return ps;
}

// Score of the profile log-likelihood, up to the positive factor n / shape:
//   1 + digamma(1/s)/s - S1/S0 + log(s S0 / n) / s
// together with its derivative in s.
struct Score {
    double value;
    double slope;
};

Score profile_score(const LogMagnitudes& lm, double s) {
    const auto ps = power_sums(lm, s);
    const double inv = 1.0 / s;
    const double mean_log = ps.s1 / ps.s0;
    const double var_log = ps.s2 / ps.s0 - mean_log * mean_log;
    const double log_term = std::log(s * ps.s0 / static_cast<double>(lm.n));
    const double dg = boost::math::digamma(inv);
    const double tg = boost::math::trigamma(inv);

    Score sc;
    sc.value = 1.0 + dg * inv - mean_log + log_term * inv;
    sc.slope = -dg * inv * inv - tg * inv * inv * inv - var_log + (inv + mean_log) * inv - log_term * inv * inv;
    return sc;
}

// Kurtosis matching about zero, clamped into [lo, hi].
double moment_shape(std::span<const double> data, double lo, double hi) {
    double m2 = 0.0;
    double m4 = 0.0;
    double max_abs = 0.0;
    for (const double x : data) max_abs = std::max(max_abs, std::abs(x));
    for (const double x : data) {
        const double y = x / max_abs;
        const double y2 = y * y;
        m2 += y2;
        m4 += y2 * y2;
    }
    const double n = static_cast<double>(data.size());
    const double target = std::log(n * m4 / (m2 * m2));
    auto log_kurt = [](double s) {
        return std::lgamma(5.0 / s) + std::lgamma(1.0 / s) - 2.0 * std::lgamma(3.0 / s);
    };
    if (target >= log_kurt(lo)) return lo;
    if (target <= log_kurt(hi)) return hi;
    double a = std::log(lo);
    double b = std::log(hi);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        if (log_kurt(std::exp(mid)) > target) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return std::exp(0.5 * (a + b));
}

}  // namespace

double ggd_logpdf(double x, const GgdParams& p) {
    check_params(p);
    const double z = std::abs(x) / p.scale;
    const double tail = z == 0.0 ? 0.0 : std::exp(p.shape * std::log(z));
    return std::log(p.shape) - std::log(2.0 * p.scale) - std::lgamma(1.0 / p.shape) - tail;
}

double ggd_log_likelihood(std::span<const double> data, double scale, double shape) {
    const GgdParams p{scale, shape, 0.0};
    check_params(p);
    const double n = static_cast<double>(data.size());
    const double log_scale = std::log(scale);
    double tail = 0.0;
    for (const double x : data) {
        if (x != 0.0) tail += std::exp(shape * (std::log(std::abs(x)) - log_scale));
    }
    return n * (std::log(shape) - std::log(2.0) - log_scale - std::lgamma(1.0 / shape)) - tail;
}

double ggd_variance(const GgdParams& p) {
    check_params(p);
    return p.scale * p.scale * std::exp(std::lgamma(3.0 / p.shape) - std::lgamma(1.0 / p.shape));
}

double ggd_kurtosis(double shape) {
    return std::exp(std::lgamma(5.0 / shape) + std::lgamma(1.0 / shape) - 2.0 * std::lgamma(3.0 / shape));
}

double profile_scale(std::span<const double> data, double shape) {
    if (data.empty()) throw Error(ErrorCode::DegenerateData, "no data");
    const auto lm = log_magnitudes(data);
    if (lm.logs.empty()) throw Error(ErrorCode::DegenerateData, "all values are zero");
    const auto ps = power_sums(lm, shape);
    return std::exp(lm.log_max + std::log(shape * ps.s0 / static_cast<double>(lm.n)) / shape);
}

GgdFit fit_ggd(std::span<const double> data, const GgdSolverOptions& opts) {
    if (!(opts.shape_min > 0.0) || !(opts.shape_min < opts.shape_max) || !(opts.tolerance > 0.0) ||
        opts.max_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "invalid GGD solver options");
    }
    if (data.size() < 2) throw Error(ErrorCode::DegenerateData, "need at least two values to fit a GGD");
    for (const double x : data) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "GGD data must be finite");
    }
    if (std::all_of(data.begin(), data.end(), [&](double x) { return x == data.front(); })) {
        throw Error(ErrorCode::DegenerateData, "all values are identical; no finite-scale maximizer");
    }

    const auto lm = log_magnitudes(data);
    GgdFit fit;
    fit.initial_shape = moment_shape(data, opts.shape_min, opts.shape_max);

    double shape = 0.0;
    const double g_lo = profile_score(lm, opts.shape_min).value;
    const double g_hi = profile_score(lm, opts.shape_max).value;
    if (g_lo <= 0.0) {
        shape = opts.shape_min;
        fit.clamped_low = true;
    } else if (g_hi >= 0.0) {
        shape = opts.shape_max;
        fit.clamped_high = true;
    } else {
        // Safeguarded Newton: the score is positive left of the root and
        // negative right of it; fall back to bisection whenever the Newton
        // step leaves the bracket.
        double lo = opts.shape_min;
        double hi = opts.shape_max;
        double s = fit.initial_shape;
        if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
        bool converged = false;
        for (int it = 1; it <= opts.max_iterations; ++it) {
            fit.iterations = it;
            const auto sc = profile_score(lm, s);
            if (sc.value > 0.0) {
                lo = s;
            } else if (sc.value < 0.0) {
                hi = s;
            } else {
                converged = true;
                break;
            }
            double next = s - sc.value / sc.slope;
            if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
            const double step = std::abs(next - s);
            s = next;
            if (step < opts.tolerance || hi - lo < opts.tolerance) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw Error(ErrorCode::NoConvergence,
                        "GGD shape iteration did not converge in " + std::to_string(opts.max_iterations) + " steps");
        }
        shape = s;
    }

    const auto ps = power_sums(lm, shape);
    fit.params.shape = shape;
    fit.params.scale = std::exp(lm.log_max + std::log(shape * ps.s0 / static_cast<double>(lm.n)) / shape);
    fit.params.log_likelihood = ggd_log_likelihood(data, fit.params.scale, shape);
    return fit;
}

std::vector<double> sample_ggd(const GgdParams& p, std::size_t n, std::uint64_t seed) {
    check_params(p);
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(1.0 / p.shape, 1.0);
    const double inv_shape = 1.0 / p.shape;
    std::vector<double> out(n);
    for (auto& x : out) {
        const double magnitude = p.scale * std::pow(gamma(rng), inv_shape);
        const bool negative = (rng() >> 63) != 0;
        x = negative ? -magnitude : magnitude;
    }
    return out;
}

}  // namespace swd
