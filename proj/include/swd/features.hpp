#pragma once

#include "swd/ggd.hpp"
#include "swd/morlet.hpp"
#include "swd/signal_model.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swd {

inline constexpr std::size_t kFeatureDim = 3;
using FeaturePoint = std::array<double, kFeatureDim>;

/// Per-segment predictors: GGD scale, variance and median of the pooled
/// wavelet coefficients.
struct FeatureVector {
    double ggd_scale = 0.0;
    double variance = 0.0;
    double median = 0.0;
    std::string channel_label;
    std::size_t segment_start_index = 0;
    std::optional<ClassLabel> label;

    FeaturePoint point() const noexcept { return {ggd_scale, variance, median}; }
};

/// Population (1/n) variance about the mean.
double population_variance(std::span<const double> values);

/// Mean of the two central order statistics for even counts.
double median(std::span<const double> values);

FeatureVector extract_features(std::span<const double> pooled, const GgdSolverOptions& opts = {});

/// Pools every scale and time sample of the matrix into one sample. Throws
/// DegenerateCoefficients when the GGD fit has no finite maximizer.
FeatureVector extract_features(const WaveletCoefficients& coeffs, const GgdSolverOptions& opts = {});

struct Interval {
    double lo;
    double hi;
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

struct FeatureEnvelope {
    Interval ggd_scale;
    Interval variance;
    Interval median;
};

/// Per-class feature ranges observed on clinical recordings.
const FeatureEnvelope& reference_envelope(ClassLabel c) noexcept;

struct EnvelopeReport {
    bool ggd_scale_inside = false;
    bool variance_inside = false;
    bool median_inside = false;

    bool inside() const noexcept { return ggd_scale_inside && variance_inside && median_inside; }
};

/// Advisory check of a vector against the reference range of `label`.
EnvelopeReport check_table1_bounds(const FeatureVector& fv, ClassLabel label) noexcept;

// Feature CSV: channel,start_index,sigma,variance,median,label
// The label cell is "swd", "non-swd" or empty for unlabeled rows.
std::string format_features_csv(std::span<const FeatureVector> features);
std::vector<FeatureVector> parse_features_csv(std::string_view text);
void save_features_csv(std::span<const FeatureVector> features, const std::filesystem::path& path);
std::vector<FeatureVector> load_features_csv(const std::filesystem::path& path);

}  // namespace swd
