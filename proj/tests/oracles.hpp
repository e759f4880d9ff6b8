#pragma once

// Brute-force reference computations used only by the tests. Each one is a
// literal transcription of the defining formula and shares no code path with
// the library routine it checks.

#include "swd/classifier.hpp"
#include "swd/morlet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

namespace swd::oracle {

/// dt / sqrt(a) * sum_n x[n] psi((n - j) / a), psi evaluated inline from its
/// formula. Terms with |(n - j) / a| > support are dropped; the default keeps
/// every term.
inline std::vector<double> direct_cwt(std::span<const double> x, const ScaleGrid& grid,
                                      double support = std::numeric_limits<double>::infinity()) {
    const auto n = x.size();
    std::vector<double> out(grid.size() * n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid.scales[i];
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const double t = (static_cast<double>(m) - static_cast<double>(j)) / a;
                if (std::abs(t) > support) continue;
                acc += x[m] * std::exp(-t * t / 2.0) * std::cos(5.0 * t);
            }
            out[i * n + j] = acc * grid.sampling_period_s / std::sqrt(a);
        }
    }
    return out;
}

inline double relative_frobenius(std::span<const double> a, std::span<const double> b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

/// |sum_n x[n] exp(-2 pi i f n dt)| at a single frequency.
inline double dtft_magnitude(std::span<const double> x, double dt, double f) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < x.size(); ++n) {
        acc += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(n) * dt);
    }
    return std::abs(acc);
}

/// Composite Simpson rule on [lo, hi] with an even number of panels.
template <class F>
double simpson(F f, double lo, double hi, std::size_t panels) {
    if (panels % 2 == 1) ++panels;
    const double h = (hi - lo) / static_cast<double>(panels);
    double s = f(lo) + f(hi);
    for (std::size_t k = 1; k < panels; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(lo + static_cast<double>(k) * h);
    return s * h / 3.0;
}

/// Literal GGD density tau / (2 s Gamma(1/tau)) exp(-|x/s|^tau).
inline double ggd_pdf(double x, double s, double tau) {
    return tau / (2.0 * s * std::tgamma(1.0 / tau)) * std::exp(-std::pow(std::abs(x / s), tau));
}

struct GridBest {
    double log_likelihood;
    double scale;
    double shape;
};

/// Best log-likelihood on an n_s x n_t grid over scale in [s_lo, s_hi] and
/// shape in [t_lo, t_hi], both linear. The power sum is shared across the
/// scale axis, which is exact since sum |x/s|^t = s^-t sum |x|^t.
inline GridBest ggd_grid_search(std::span<const double> data, double s_lo, double s_hi, double t_lo, double t_hi,
                                std::size_t n_s = 400, std::size_t n_t = 400) {
    const double n = static_cast<double>(data.size());
    GridBest best{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t it = 0; it < n_t; ++it) {
        const double t = t_lo + (t_hi - t_lo) * static_cast<double>(it) / static_cast<double>(n_t - 1);
        double power_sum = 0.0;
        for (const double x : data) power_sum += std::pow(std::abs(x), t);
        for (std::size_t is = 0; is < n_s; ++is) {
            const double s = s_lo + (s_hi - s_lo) * static_cast<double>(is) / static_cast<double>(n_s - 1);
            const double ll =
                n * (std::log(t) - std::log(2.0 * s) - std::lgamma(1.0 / t)) - power_sum / std::pow(s, t);
            if (ll > best.log_likelihood) best = {ll, s, t};
        }
    }
    return best;
}

/// Term-by-term class density: 1/N_c sum (2 pi h^2)^(-D/2) exp(-|q - x|^2 / 2h^2).
inline double naive_class_density(const std::vector<FeaturePoint>& pts, const std::vector<ClassLabel>& labels,
                                  const FeaturePoint& q, ClassLabel c, double h2) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (labels[i] != c) continue;
        ++count;
        double d2 = 0.0;
        for (std::size_t d = 0; d < 3; ++d) d2 += std::pow(q[d] - pts[i][d], 2);
        sum += std::pow(2.0 * std::numbers::pi * h2, -1.5) * std::exp(-d2 / (2.0 * h2));
    }
    return sum / static_cast<double>(count);
}

struct BruteKnn {
    ClassLabel label;
    int votes0;
    int votes1;
};

/// Sorts every distance (stable on index), takes the first k, majority vote,
/// vote ties to the nearest neighbor's class.
inline BruteKnn brute_knn(const std::vector<FeaturePoint>& pts, const std::vector<ClassLabel>& labels,
                          const FeaturePoint& q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < 3; ++d) d2 += (q[d] - pts[i][d]) * (q[d] - pts[i][d]);
        all.emplace_back(d2, i);
    }
    std::sort(all.begin(), all.end());
    BruteKnn out{ClassLabel::NonSwd, 0, 0};
    for (std::size_t r = 0; r < k; ++r) (labels[all[r].second] == ClassLabel::Swd ? out.votes1 : out.votes0)++;
    if (out.votes0 == out.votes1) {
        out.label = labels[all[0].second];
    } else {
        out.label = out.votes1 > out.votes0 ? ClassLabel::Swd : ClassLabel::NonSwd;
    }
    return out;
}

}  // namespace swd::oracle
