#pragma once

#include "swd/features.hpp"

#include <json.hpp>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace swd {

enum class ScalingMode { ZScore, Raw };

std::string_view scaling_mode_name(ScalingMode m) noexcept;
ScalingMode parse_scaling_mode(std::string_view text);

/// Per-dimension affine map (x - offset) * factor.
struct AffineScaling {
    FeaturePoint offset{0.0, 0.0, 0.0};
    FeaturePoint factor{1.0, 1.0, 1.0};

    FeaturePoint apply(const FeaturePoint& p) const noexcept;
};

/// z-score per dimension with the population standard deviation. Throws
/// ZeroSpread if any dimension is constant.
AffineScaling fit_scaling(std::span<const FeatureVector> points);

/// Labeled training points together with their scaled coordinates.
class TrainingSet {
public:
    /// Fits the scaling (z-score or identity) on `points`. Every point must
    /// carry a label and both classes must be present (SingleClass otherwise).
    static TrainingSet build(std::vector<FeatureVector> points, ScalingMode mode);

    /// Reuses a previously fitted scaling, e.g. one restored from disk.
    TrainingSet(std::vector<FeatureVector> points, ScalingMode mode, const AffineScaling& scaling);

    const std::vector<FeatureVector>& points() const noexcept { return points_; }
    const std::vector<FeaturePoint>& scaled() const noexcept { return scaled_; }
    ClassLabel label(std::size_t i) const noexcept { return *points_[i].label; }
    std::size_t size() const noexcept { return points_.size(); }
    std::size_t count(ClassLabel c) const noexcept { return c == ClassLabel::Swd ? n1_ : n0_; }
    std::size_t n0() const noexcept { return n0_; }
    std::size_t n1() const noexcept { return n1_; }
    ScalingMode mode() const noexcept { return mode_; }
    const AffineScaling& scaling() const noexcept { return scaling_; }

    FeaturePoint scale(const FeatureVector& fv) const noexcept { return scaling_.apply(fv.point()); }

private:
    std::vector<FeatureVector> points_;
    std::vector<FeaturePoint> scaled_;
    ScalingMode mode_;
    AffineScaling scaling_;
    std::size_t n0_ = 0;
    std::size_t n1_ = 0;
};

double squared_distance(const FeaturePoint& a, const FeaturePoint& b) noexcept;

// ---------------------------------------------------------------------------
// Kernel-density Bayes classifier. Each class density is an isotropic
// Gaussian mixture with one component per training point and common variance
// bandwidth_sq (h^2); priors are the class frequencies. Everything is carried
// in log space since exp(-d^2 / 2h^2) underflows for realistic distances.
// ---------------------------------------------------------------------------

class KernelBayesModel {
public:
    KernelBayesModel(TrainingSet train, double bandwidth_sq);

    const TrainingSet& train() const noexcept { return train_; }
    double bandwidth_sq() const noexcept { return bandwidth_sq_; }
    double prior(ClassLabel c) const noexcept;

    /// Queries below are in the scaled space (use train().scale()).
    double log_class_density(const FeaturePoint& q, ClassLabel c) const;
    double class_density(const FeaturePoint& q, ClassLabel c) const;

    /// log[ p(q|0) P(0) / (p(q|1) P(1)) ]
    double log_posterior_ratio(const FeaturePoint& q) const;
    double posterior_ratio(const FeaturePoint& q) const;

    /// P(c | q) for both classes, normalized through a shared log-sum-exp.
    std::array<double, 2> posteriors(const FeaturePoint& q) const;

    /// Class 0 iff the ratio exceeds one; a ratio of exactly one gives SWD.
    ClassLabel classify(const FeaturePoint& q) const;

private:
    TrainingSet train_;
    double bandwidth_sq_;
};

struct Neighbor {
    std::size_t index;
    double distance_sq;
    ClassLabel label;
};

struct KnnDecision {
    ClassLabel label = ClassLabel::NonSwd;
    int votes_non_swd = 0;
    int votes_swd = 0;
    std::vector<Neighbor> neighbors;  // nearest first
};

/// Unweighted Euclidean k-NN. Distance ties at the k-th rank go to the lower
/// training index; vote ties go to the class of the single nearest neighbor.
class KnnModel {
public:
    KnnModel(TrainingSet train, std::size_t k = 10);

    const TrainingSet& train() const noexcept { return train_; }
    std::size_t k() const noexcept { return k_; }

    KnnDecision classify_scaled(const FeaturePoint& q) const;
    KnnDecision classify(const FeatureVector& q) const { return classify_scaled(train_.scale(q)); }

private:
    TrainingSet train_;
    std::size_t k_;
};

/// Decisions of the kernel-Bayes rule along a shrinking bandwidth schedule,
/// compared against the 1-NN decision they must converge to.
struct LimitCheck {
    ClassLabel nearest_neighbor_label = ClassLabel::NonSwd;
    std::vector<double> bandwidths_sq;
    std::vector<ClassLabel> decisions;
    bool converged = false;
};

/// Evaluates the rule at h^2 in {1, 1e-1, ..., 1e-6} on `model`'s training
/// set. Convergence means the two smallest bandwidths both reproduce the
/// 1-NN label. Throws InvalidArgument when the nearest class-0 and class-1
/// points are equidistant from q.
LimitCheck knn_limit_check(const KernelBayesModel& model, const FeaturePoint& q);

inline constexpr std::string_view kModelSchema = "swd-knn-model/1";

nlohmann::json model_to_json(const KnnModel& model);

/// Throws BadModel on schema or content errors.
KnnModel model_from_json(const nlohmann::json& doc);

}  // namespace swd
