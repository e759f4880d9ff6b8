#pragma once

#include "swd/segmenter.hpp"

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace swd {

/// Center frequency of the real Morlet wavelet exp(-t^2/2) cos(5t), in
/// cycles per unit of t.
inline constexpr double kMorletCenterFrequency = 5.0 / (2.0 * std::numbers::pi);

/// |t| beyond which the Gaussian envelope of the wavelet drops below 1e-8.
extern const double kMorletSupport;

/// psi(t) = exp(-t^2 / 2) cos(5 t)
double morlet_psi(double t) noexcept;

/// Scales (in samples) paired with their pseudo-frequencies
/// F_a = F_c / (a * dt). Scales increase, so pseudo-frequencies decrease.
struct ScaleGrid {
    std::vector<double> scales;
    std::vector<double> pseudo_freqs_hz;
    double sampling_period_s = 0.0;

    std::size_t size() const noexcept { return scales.size(); }
    double sample_rate_hz() const noexcept { return 1.0 / sampling_period_s; }
};

double scale_to_frequency(double scale, double sampling_period_s) noexcept;
double frequency_to_scale(double freq_hz, double sampling_period_s) noexcept;

/// Log-spaced pseudo-frequencies on [f_min, f_max]. Throws BadBand unless
/// 0 < f_min < f_max < rate / 2.
ScaleGrid build_scale_grid(double rate_hz, double f_min = 1.0, double f_max = 3.0, std::size_t n_scales = 21);

/// Row-major scales x time coefficient matrix for one segment.
struct WaveletCoefficients {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    ScaleGrid grid;
    std::string channel_label;
    std::size_t segment_start_index = 0;

    double at(std::size_t row, std::size_t col) const noexcept { return values[row * cols + col]; }
    std::span<const double> row(std::size_t r) const noexcept { return {values.data() + r * cols, cols}; }
};

/// Riemann-sum CWT with zero padding outside the segment:
///   W[i][j] = dt / sqrt(a_i) * sum_n x[n] psi((n - j) / a_i)
/// The wavelet is truncated at |(n - j) / a_i| > kMorletSupport.
std::vector<double> cwt_matrix(std::span<const double> signal, const ScaleGrid& grid);

/// Throws GridRateMismatch when the grid was built for another rate.
WaveletCoefficients cwt(const Segment& seg, const ScaleGrid& grid);

/// Debug dump: one row per scale, first column the pseudo-frequency.
std::string format_coefficients_csv(const WaveletCoefficients& coeffs);

}  // namespace swd
