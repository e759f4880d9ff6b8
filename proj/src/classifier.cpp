#include "swd/classifier.hpp"

#include "swd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace swd {

std::string_view scaling_mode_name(ScalingMode m) noexcept {
    return m == ScalingMode::ZScore ? "zscore" : "raw";
}

ScalingMode parse_scaling_mode(std::string_view text) {
    if (text == "zscore") return ScalingMode::ZScore;
    if (text == "raw") return ScalingMode::Raw;
    throw Error(ErrorCode::InvalidArgument, "scaling mode must be 'zscore' or 'raw'");
}

FeaturePoint AffineScaling::apply(const FeaturePoint& p) const noexcept {
    FeaturePoint out;
    for (std::size_t d = 0; d < kFeatureDim; ++d) out[d] = (p[d] - offset[d]) * factor[d];
    return out;
}

AffineScaling fit_scaling(std::span<const FeatureVector> points) {
    if (points.size() < 2) throw Error(ErrorCode::ZeroSpread, "scaling needs at least two points");
    AffineScaling s;
    const double n = static_cast<double>(points.size());
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        double mean = 0.0;
        for (const auto& p : points) mean += p.point()[d];
        mean /= n;
        double ss = 0.0;
        for (const auto& p : points) {
            const double dev = p.point()[d] - mean;
            ss += dev * dev;
        }
        const double sd = std::sqrt(ss / n);
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            throw Error(ErrorCode::ZeroSpread, "feature dimension " + std::to_string(d) + " is constant");
        }
        s.offset[d] = mean;
        s.factor[d] = 1.0 / sd;
    }
    return s;
}

TrainingSet TrainingSet::build(std::vector<FeatureVector> points, ScalingMode mode) {
    const AffineScaling scaling = mode == ScalingMode::ZScore ? fit_scaling(points) : AffineScaling{};
    return TrainingSet(std::move(points), mode, scaling);
}

TrainingSet::TrainingSet(std::vector<FeatureVector> points, ScalingMode mode, const AffineScaling& scaling)
    : points_(std::move(points)), mode_(mode), scaling_(scaling) {
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        if (!(scaling_.factor[d] > 0.0) || !std::isfinite(scaling_.factor[d]) || !std::isfinite(scaling_.offset[d])) {
            throw Error(ErrorCode::InvalidArgument, "scaling factors must be positive and finite");
        }
    }
    scaled_.reserve(points_.size());
    for (const auto& p : points_) {
        if (!p.label) throw Error(ErrorCode::InvalidArgument, "training points must be labeled");
        (*p.label == ClassLabel::Swd ? n1_ : n0_) += 1;
        scaled_.push_back(scaling_.apply(p.point()));
    }
    if (n0_ == 0 || n1_ == 0) throw Error(ErrorCode::SingleClass, "training data must contain both classes");
}

double squared_distance(const FeaturePoint& a, const FeaturePoint& b) noexcept {
    double s = 0.0;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

KernelBayesModel::KernelBayesModel(TrainingSet train, double bandwidth_sq)
    : train_(std::move(train)), bandwidth_sq_(bandwidth_sq) {
    if (!(bandwidth_sq_ > 0.0) || !std::isfinite(bandwidth_sq_)) {
        throw Error(ErrorCode::InvalidArgument, "kernel bandwidth must be positive");
    }
}

double KernelBayesModel::prior(ClassLabel c) const noexcept {
    return static_cast<double>(train_.count(c)) / static_cast<double>(train_.size());
}

double KernelBayesModel::log_class_density(const FeaturePoint& q, ClassLabel c) const {
    const auto& scaled = train_.scaled();
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(train_.count(c));
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        if (train_.label(i) != c) continue;
        const double t = -squared_distance(q, scaled[i]) / (2.0 * bandwidth_sq_);
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    double acc = 0.0;
    for (const double t : terms) acc += std::exp(t - max_term);
    const double d = static_cast<double>(kFeatureDim);
    return max_term + std::log(acc) - std::log(static_cast<double>(terms.size())) -
           0.5 * d * std::log(2.0 * std::numbers::pi * bandwidth_sq_);
}

double KernelBayesModel::class_density(const FeaturePoint& q, ClassLabel c) const {
    return std::exp(log_class_density(q, c));
}

double KernelBayesModel::log_posterior_ratio(const FeaturePoint& q) const {
    const double a = log_class_density(q, ClassLabel::NonSwd) + std::log(prior(ClassLabel::NonSwd));
    const double b = log_class_density(q, ClassLabel::Swd) + std::log(prior(ClassLabel::Swd));
    return a - b;
}

double KernelBayesModel::posterior_ratio(const FeaturePoint& q) const {
    return std::exp(log_posterior_ratio(q));
}

std::array<double, 2> KernelBayesModel::posteriors(const FeaturePoint& q) const {
    // Both from the log ratio: normalizing each log joint separately loses
    // |log density| * eps of absolute accuracy.
    const double d = log_posterior_ratio(q);
    const double e = std::exp(-std::abs(d));
    const double big = 1.0 / (1.0 + e);
    const double small = e / (1.0 + e);
    return d >= 0.0 ? std::array<double, 2>{big, small} : std::array<double, 2>{small, big};
}

ClassLabel KernelBayesModel::classify(const FeaturePoint& q) const {
    return log_posterior_ratio(q) > 0.0 ? ClassLabel::NonSwd : ClassLabel::Swd;
}

KnnModel::KnnModel(TrainingSet train, std::size_t k) : train_(std::move(train)), k_(k) {
    if (train_.size() == 0) throw Error(ErrorCode::EmptyModel, "k-NN model has no training points");
    if (k_ < 1 || k_ > train_.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "k must lie in [1, " + std::to_string(train_.size()) + "], got " + std::to_string(k_));
    }
}

KnnDecision KnnModel::classify_scaled(const FeaturePoint& q) const {
    const auto& scaled = train_.scaled();
    std::vector<double> dist(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) dist[i] = squared_distance(q, scaled[i]);

    std::vector<std::size_t> order(scaled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto kth = order.begin() + static_cast<std::ptrdiff_t>(k_);
    std::partial_sort(order.begin(), kth, order.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });

    KnnDecision out;
    out.neighbors.reserve(k_);
    for (auto it = order.begin(); it != kth; ++it) {
        const auto label = train_.label(*it);
        out.neighbors.push_back({*it, dist[*it], label});
        (label == ClassLabel::Swd ? out.votes_swd : out.votes_non_swd) += 1;
    }
    if (out.votes_swd != out.votes_non_swd) {
        out.label = out.votes_swd > out.votes_non_swd ? ClassLabel::Swd : ClassLabel::NonSwd;
    } else {
        out.label = out.neighbors.front().label;
    }
    return out;
}

LimitCheck knn_limit_check(const KernelBayesModel& model, const FeaturePoint& q) {
    const auto& train = model.train();
    double best0 = std::numeric_limits<double>::infinity();
    double best1 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < train.size(); ++i) {
        const double d = squared_distance(q, train.scaled()[i]);
        auto& best = train.label(i) == ClassLabel::Swd ? best1 : best0;
        best = std::min(best, d);
    }
    if (best0 == best1) {
        throw Error(ErrorCode::InvalidArgument, "query is equidistant from both classes; the limit is undefined");
    }

    LimitCheck check;
    check.nearest_neighbor_label = best0 < best1 ? ClassLabel::NonSwd : ClassLabel::Swd;
    double h2 = 1.0;
    for (int i = 0; i <= 6; ++i, h2 /= 10.0) {
        const KernelBayesModel at_h(train, h2);
        check.bandwidths_sq.push_back(h2);
        check.decisions.push_back(at_h.classify(q));
    }
    const auto n = check.decisions.size();
    check.converged = check.decisions[n - 1] == check.nearest_neighbor_label &&
                      check.decisions[n - 2] == check.nearest_neighbor_label;
    return check;
}

nlohmann::json model_to_json(const KnnModel& model) {
    const auto& train = model.train();
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : train.points()) {
        points.push_back({{"channel", p.channel_label},
                          {"start_index", p.segment_start_index},
                          {"sigma", p.ggd_scale},
                          {"variance", p.variance},
                          {"median", p.median},
                          {"label", std::string(label_name(*p.label))}});
    }
    const auto& s = train.scaling();
    return {{"schema", std::string(kModelSchema)},
            {"k", model.k()},
            {"scaling_mode", std::string(scaling_mode_name(train.mode()))},
            {"scaling", {{"offset", s.offset}, {"factor", s.factor}}},
            {"n0", train.n0()},
            {"n1", train.n1()},
            {"points", std::move(points)}};
}

KnnModel model_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object() || doc.value("schema", std::string{}) != kModelSchema) {
            throw Error(ErrorCode::BadModel, "model schema tag must be '" + std::string(kModelSchema) + "'");
        }
        const auto mode = parse_scaling_mode(doc.at("scaling_mode").get<std::string>());
        AffineScaling scaling;
        scaling.offset = doc.at("scaling").at("offset").get<FeaturePoint>();
        scaling.factor = doc.at("scaling").at("factor").get<FeaturePoint>();

        std::vector<FeatureVector> points;
        for (const auto& item : doc.at("points")) {
            FeatureVector f;
            f.channel_label = item.at("channel").get<std::string>();
            f.segment_start_index = item.at("start_index").get<std::size_t>();
            f.ggd_scale = item.at("sigma").get<double>();
            f.variance = item.at("variance").get<double>();
            f.median = item.at("median").get<double>();
            f.label = parse_label(item.at("label").get<std::string>());
            if (!f.label) throw Error(ErrorCode::BadModel, "bad label in model point");
            points.push_back(std::move(f));
        }
        TrainingSet train(std::move(points), mode, scaling);
        if (doc.contains("n0") && (doc["n0"].get<std::size_t>() != train.n0() || doc["n1"].get<std::size_t>() != train.n1())) {
            throw Error(ErrorCode::BadModel, "class counts do not match the stored points");
        }
        return KnnModel(std::move(train), doc.at("k").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadModel, std::string("model JSON: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadModel) throw;
        throw Error(ErrorCode::BadModel, std::string("model JSON: ") + e.what());
    }
}

}  // namespace swd
