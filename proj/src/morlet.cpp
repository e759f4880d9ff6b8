#include "swd/morlet.hpp"

#include "swd/error.hpp"
#include "swd/signal_model.hpp"

#include <algorithm>
#include <cmath>

namespace swd {

const double kMorletSupport = std::sqrt(2.0 * std::log(1e8));

double morlet_psi(double t) noexcept {
    return std::exp(-0.5 * t * t) * std::cos(5.0 * t);
}

double scale_to_frequency(double scale, double sampling_period_s) noexcept {
    return kMorletCenterFrequency / (scale * sampling_period_s);
}

double frequency_to_scale(double freq_hz, double sampling_period_s) noexcept {
    return kMorletCenterFrequency / (freq_hz * sampling_period_s);
}

ScaleGrid build_scale_grid(double rate_hz, double f_min, double f_max, std::size_t n_scales) {
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
        throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
    }
    if (!(f_min > 0.0) || !(f_min < f_max) || !(f_max < 0.5 * rate_hz)) {
        throw Error(ErrorCode::BadBand, "band needs 0 < f_min < f_max < rate/2");
    }
    if (n_scales == 0) throw Error(ErrorCode::InvalidArgument, "need at least one scale");

    ScaleGrid grid;
    grid.sampling_period_s = 1.0 / rate_hz;
    grid.scales.resize(n_scales);
    grid.pseudo_freqs_hz.resize(n_scales);
    const double log_hi = std::log(f_max);
    const double log_lo = std::log(f_min);
    for (std::size_t i = 0; i < n_scales; ++i) {
        // Highest frequency first so the scales come out increasing.
        double f = f_max;
        if (n_scales > 1) {
            const double frac = static_cast<double>(i) / static_cast<double>(n_scales - 1);
            f = std::exp(log_hi + frac * (log_lo - log_hi));
        }
        if (i == n_scales - 1 && n_scales > 1) f = f_min;
        if (i == 0) f = f_max;
        grid.pseudo_freqs_hz[i] = f;
        grid.scales[i] = frequency_to_scale(f, grid.sampling_period_s);
    }
    return grid;
}

std::vector<double> cwt_matrix(std::span<const double> signal, const ScaleGrid& grid) {
    const auto n = signal.size();
    std::vector<double> out(grid.size() * n, 0.0);
    if (n == 0) return out;

    std::vector<double> kernel;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid.scales[i];
        const double norm = grid.sampling_period_s / std::sqrt(a);
        const auto reach = static_cast<std::ptrdiff_t>(
            std::min<double>(static_cast<double>(n - 1), std::floor(kMorletSupport * a)));

        // kernel[m + reach] = psi(m / a) for m in [-reach, reach]
        kernel.assign(static_cast<std::size_t>(2 * reach + 1), 0.0);
        for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
            kernel[static_cast<std::size_t>(m + reach)] = morlet_psi(static_cast<double>(m) / a);
        }

        double* row = out.data() + i * n;
        const auto len = static_cast<std::ptrdiff_t>(n);
        for (std::ptrdiff_t j = 0; j < len; ++j) {
            const auto lo = std::max<std::ptrdiff_t>(0, j - reach);
            const auto hi = std::min<std::ptrdiff_t>(len - 1, j + reach);
            const double* k = kernel.data() + (lo - j + reach);
            double acc = 0.0;
            for (std::ptrdiff_t m = lo; m <= hi; ++m) acc += signal[static_cast<std::size_t>(m)] * k[m - lo];
            row[j] = norm * acc;
        }
    }
    return out;
}

WaveletCoefficients cwt(const Segment& seg, const ScaleGrid& grid) {
    if (std::abs(grid.sample_rate_hz() - seg.sample_rate_hz) > 1e-9 * seg.sample_rate_hz) {
        throw Error(ErrorCode::GridRateMismatch, "scale grid built for " + format_double(grid.sample_rate_hz()) +
                                                     " Hz, segment sampled at " + format_double(seg.sample_rate_hz) +
                                                     " Hz");
    }
    WaveletCoefficients c;
    c.rows = grid.size();
    c.cols = seg.samples.size();
    c.values = cwt_matrix(seg.samples, grid);
    c.grid = grid;
    c.channel_label = seg.channel_label;
    c.segment_start_index = seg.start_index;
    return c;
}

std::string format_coefficients_csv(const WaveletCoefficients& coeffs) {
    std::string out = "pseudo_freq_hz";
    for (std::size_t j = 0; j < coeffs.cols; ++j) out += ",t" + std::to_string(coeffs.segment_start_index + j);
    out += '\n';
    for (std::size_t i = 0; i < coeffs.rows; ++i) {
        out += format_double(coeffs.grid.pseudo_freqs_hz[i]);
        for (const double v : coeffs.row(i)) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace swd
