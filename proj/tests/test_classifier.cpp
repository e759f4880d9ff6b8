#include "swd/classifier.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace swd;

namespace {

FeatureVector fv(double a, double b, double c, ClassLabel label) {
    FeatureVector f;
    f.ggd_scale = a;
    f.variance = b;
    f.median = c;
    f.label = label;
    return f;
}

constexpr auto C0 = ClassLabel::NonSwd;
constexpr auto C1 = ClassLabel::Swd;

struct RandomSet {
    std::vector<FeatureVector> points;
    std::vector<FeaturePoint> coords;
    std::vector<ClassLabel> labels;
};

RandomSet random_set(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d(0.0, 1.0);
    RandomSet s;
    for (std::size_t i = 0; i < n; ++i) {
        const auto label = (i < 2) ? (i == 0 ? C0 : C1) : ((rng() & 1) ? C1 : C0);
        const double shift = label == C1 ? 0.8 : 0.0;
        const FeaturePoint p{d(rng) + shift, d(rng) + shift, d(rng)};
        s.points.push_back(fv(p[0], p[1], p[2], label));
        s.coords.push_back(p);
        s.labels.push_back(label);
    }
    return s;
}

FeaturePoint random_point(std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.5);
    return {d(rng), d(rng), d(rng)};
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("class density at a coincident single point") {
    const KernelBayesModel m(TrainingSet::build({fv(1, 2, 3, C0), fv(9, 9, 9, C1)}, ScalingMode::Raw), 1.0);
    CHECK(m.class_density({1, 2, 3}, C0) == doctest::Approx(std::pow(2.0 * std::numbers::pi, -1.5)).epsilon(1e-14));
    CHECK(m.class_density({1, 2, 3}, C0) == doctest::Approx(0.06350).epsilon(1e-4));
}

TEST_CASE("class density with two equidistant points") {
    const double h2 = 0.7;
    const double d = 1.3;
    const KernelBayesModel m(TrainingSet::build({fv(d, 0, 0, C0), fv(-d, 0, 0, C0), fv(5, 5, 5, C1)}, ScalingMode::Raw),
                             h2);
    const double expected = std::pow(2.0 * std::numbers::pi * h2, -1.5) * std::exp(-d * d / (2.0 * h2));
    CHECK(m.class_density({0, 0, 0}, C0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("class density matches term-by-term evaluation") {
    std::mt19937_64 rng(20);
    for (int trial = 0; trial < 20; ++trial) {
        const auto set = random_set(rng, 20);
        const double h2 = 0.2 + 2.0 * static_cast<double>(trial) / 20.0;
        const KernelBayesModel m(TrainingSet::build(set.points, ScalingMode::Raw), h2);
        const auto q = random_point(rng);
        for (const auto c : {C0, C1}) {
            const double naive = oracle::naive_class_density(set.coords, set.labels, q, c, h2);
            CHECK(std::abs(m.class_density(q, c) - naive) <= 1e-12 * naive);
        }
    }
}

TEST_CASE("posterior ratio") {
    SUBCASE("midway point with equal priors ties and goes to SWD") {
        const KernelBayesModel m(TrainingSet::build({fv(0, 0, 0, C0), fv(2, 0, 0, C1)}, ScalingMode::Raw), 0.5);
        CHECK(m.posterior_ratio({1, 0, 0}) == 1.0);
        CHECK(m.classify({1, 0, 0}) == C1);
    }
    SUBCASE("query on a class-0 point, class-1 point ten bandwidths away") {
        const double h = 0.3;
        const KernelBayesModel m(TrainingSet::build({fv(0, 0, 0, C0), fv(10 * h, 0, 0, C1)}, ScalingMode::Raw), h * h);
        CHECK(m.log_posterior_ratio({0, 0, 0}) == doctest::Approx(50.0).epsilon(1e-12));
        CHECK(m.classify({0, 0, 0}) == C0);
    }
    SUBCASE("agrees with a naive Bayes-rule evaluation") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            const auto set = random_set(rng, 5 + rng() % 40);
            const KernelBayesModel m(TrainingSet::build(set.points, ScalingMode::Raw), 1.5);
            const auto q = random_point(rng);
            const double n = static_cast<double>(set.points.size());
            const double p0 = m.train().n0() / n;
            const double p1 = m.train().n1() / n;
            const double naive = std::log(oracle::naive_class_density(set.coords, set.labels, q, C0, 1.5) * p0 /
                                          (oracle::naive_class_density(set.coords, set.labels, q, C1, 1.5) * p1));
            CHECK(std::abs(m.log_posterior_ratio(q) - naive) <= 1e-10);
        }
    }
    SUBCASE("far queries stay finite in log space") {
        const KernelBayesModel m(TrainingSet::build({fv(0, 0, 0, C0), fv(1, 0, 0, C1)}, ScalingMode::Raw), 1e-4);
        const double lr = m.log_posterior_ratio({300, 0, 0});
        CHECK(std::isfinite(lr));
        CHECK(lr < 0.0);
        CHECK(m.class_density({300, 0, 0}, C0) == 0.0);  // underflows outside log space
    }
}

TEST_CASE("posteriors sum to one") {
    std::mt19937_64 rng(22);
    const auto set = random_set(rng, 60);
    const KernelBayesModel m(TrainingSet::build(set.points, ScalingMode::ZScore), 0.05);
    for (int i = 0; i < 200; ++i) {
        const auto post = m.posteriors(random_point(rng));
        CHECK(std::abs(post[0] + post[1] - 1.0) <= 1e-12);
    }
}

TEST_CASE("k-NN basics") {
    const auto train = TrainingSet::build(
        {fv(0, 0, 0, C0), fv(1, 0, 0, C1), fv(1.1, 0, 0, C1), fv(-1.2, 0, 0, C0), fv(5, 5, 5, C0)}, ScalingMode::Raw);
    SUBCASE("k = 1 on a training point") {
        const KnnModel m(train, 1);
        const auto d = m.classify_scaled({1, 0, 0});
        CHECK(d.label == C1);
        CHECK(d.votes_non_swd == 0);
        CHECK(d.votes_swd == 1);
        CHECK(d.neighbors.front().distance_sq == 0.0);
    }
    SUBCASE("k = 3 majority") {
        const KnnModel m(train, 3);
        const auto d = m.classify_scaled({0.8, 0, 0});
        CHECK(d.label == C1);
        CHECK(d.votes_non_swd == 1);
        CHECK(d.votes_swd == 2);
    }
    SUBCASE("vote ties go to the nearest neighbor") {
        const KnnModel m(train, 4);
        const auto d = m.classify_scaled({-0.1, 0, 0});
        CHECK(d.votes_non_swd == 2);
        CHECK(d.votes_swd == 2);
        CHECK(d.label == C0);
    }
    CHECK_SWD_ERROR(KnnModel(train, 0), ErrorCode::InvalidArgument);
    CHECK_SWD_ERROR(KnnModel(train, 6), ErrorCode::InvalidArgument);
}

TEST_CASE("distance ties at the k-th rank prefer the lower index") {
    // Points 1 and 2 are equidistant from the query; with k = 2 only index 1 is kept.
    const auto train = TrainingSet::build({fv(0, 0, 0, C1), fv(1, 0, 0, C0), fv(-1, 0, 0, C1)}, ScalingMode::Raw);
    const KnnModel m(train, 2);
    const auto d = m.classify_scaled({0, 0, 0});
    REQUIRE(d.neighbors.size() == 2);
    CHECK(d.neighbors[1].index == 1);
    CHECK(d.label == C1);  // 1-1 vote, nearest (index 0) is SWD
}

TEST_CASE("k-NN agrees with exhaustive sorting") {
    std::mt19937_64 rng(23);
    const auto set = random_set(rng, 200);
    const KnnModel m(TrainingSet::build(set.points, ScalingMode::Raw), 10);
    for (int i = 0; i < 50; ++i) {
        const auto q = random_point(rng);
        const auto got = m.classify_scaled(q);
        const auto want = oracle::brute_knn(set.coords, set.labels, q, 10);
        CHECK(got.label == want.label);
        CHECK(got.votes_non_swd == want.votes0);
        CHECK(got.votes_swd == want.votes1);
    }
}

TEST_CASE("decisions are invariant to a common positive rescaling") {
    std::mt19937_64 rng(24);
    const auto set = random_set(rng, 120);
    for (const auto mode : {ScalingMode::Raw, ScalingMode::ZScore}) {
        std::vector<FeatureVector> scaled_points = set.points;
        const double c = 37.5;
        for (auto& p : scaled_points) {
            p.ggd_scale *= c;
            p.variance *= c;
            p.median *= c;
        }
        const KnnModel a(TrainingSet::build(set.points, mode), 7);
        const KnnModel b(TrainingSet::build(scaled_points, mode), 7);
        for (int i = 0; i < 100; ++i) {
            const auto q = random_point(rng);
            const FeatureVector qa = fv(q[0], q[1], q[2], C0);
            const FeatureVector qb = fv(c * q[0], c * q[1], c * q[2], C0);
            CHECK(a.classify(qa).label == b.classify(qb).label);
        }
    }
}

TEST_CASE("kernel rule converges to 1-NN as the bandwidth shrinks") {
    SUBCASE("query nearer a class-1 point") {
        const KernelBayesModel m(
            TrainingSet::build({fv(0, 0, 0, C0), fv(0.1, 0, 0, C0), fv(0.6, 0, 0, C1)}, ScalingMode::Raw), 1.0);
        const auto check = knn_limit_check(m, {0.5, 0, 0});
        CHECK(check.nearest_neighbor_label == C1);
        CHECK(check.converged);
        CHECK(check.decisions.size() == 7);
        CHECK(check.decisions.front() == C0);  // wide kernels side with the denser class
    }
    SUBCASE("equidistant query is rejected") {
        const KernelBayesModel m(TrainingSet::build({fv(0, 0, 0, C0), fv(2, 0, 0, C1)}, ScalingMode::Raw), 1.0);
        CHECK_SWD_ERROR(knn_limit_check(m, {1, 0, 0}), ErrorCode::InvalidArgument);
    }
    SUBCASE("random instances with a clear nearest class") {
        std::mt19937_64 rng(25);
        int tested = 0;
        while (tested < 100) {
            const auto set = random_set(rng, 30);
            const KernelBayesModel m(TrainingSet::build(set.points, ScalingMode::ZScore), 1.0);
            const auto q = random_point(rng);
            double d0 = 1e300;
            double d1 = 1e300;
            for (std::size_t i = 0; i < m.train().size(); ++i) {
                const double d = squared_distance(q, m.train().scaled()[i]);
                (m.train().label(i) == C1 ? d1 : d0) = std::min(d, m.train().label(i) == C1 ? d1 : d0);
            }
            if (std::abs(d1 - d0) < 1e-3) continue;
            ++tested;
            CHECK(knn_limit_check(m, q).converged);
        }
    }
}

TEST_CASE("z-score scaling") {
    const auto s = fit_scaling(std::vector<FeatureVector>{fv(0, 0, 0, C0), fv(2, 4, -2, C1)});
    CHECK(s.offset[0] == 1.0);
    CHECK(s.factor[0] == 1.0);
    CHECK(s.factor[1] == 0.5);
    CHECK_SWD_ERROR(fit_scaling(std::vector<FeatureVector>{fv(0, 1, 0, C0), fv(2, 1, 1, C1)}), ErrorCode::ZeroSpread);

    std::mt19937_64 rng(26);
    std::lognormal_distribution<double> wide(5.0, 2.0);
    std::vector<FeatureVector> pts;
    for (int i = 0; i < 300; ++i) pts.push_back(fv(wide(rng), wide(rng) * 1e4, wide(rng) - 1e3, i % 2 ? C1 : C0));
    const auto set = TrainingSet::build(pts, ScalingMode::ZScore);
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        double mean = 0.0;
        for (const auto& p : set.scaled()) mean += p[d];
        mean /= 300.0;
        double var = 0.0;
        for (const auto& p : set.scaled()) var += (p[d] - mean) * (p[d] - mean);
        var /= 300.0;
        CHECK(std::abs(mean) <= 1e-12);
        CHECK(std::abs(var - 1.0) <= 1e-12);
    }
}

TEST_CASE("training set invariants") {
    CHECK_SWD_ERROR(TrainingSet::build({fv(0, 0, 0, C0), fv(1, 1, 1, C0)}, ScalingMode::Raw), ErrorCode::SingleClass);
    FeatureVector unlabeled = fv(0, 0, 0, C0);
    unlabeled.label.reset();
    CHECK_SWD_ERROR(TrainingSet::build({unlabeled, fv(1, 1, 1, C1)}, ScalingMode::Raw), ErrorCode::InvalidArgument);
    const auto set = TrainingSet::build({fv(0, 0, 0, C0), fv(1, 1, 1, C1), fv(2, 3, 1, C1)}, ScalingMode::Raw);
    CHECK(set.n0() == 1);
    CHECK(set.n1() == 2);
    const KernelBayesModel m(set, 1.0);
    CHECK(m.prior(C0) + m.prior(C1) == 1.0);
    CHECK_SWD_ERROR(KernelBayesModel(set, 0.0), ErrorCode::InvalidArgument);
}

TEST_CASE("model JSON round-trip") {
    std::mt19937_64 rng(27);
    const auto set = random_set(rng, 40);
    const KnnModel m(TrainingSet::build(set.points, ScalingMode::ZScore), 5);
    const auto doc = model_to_json(m);
    CHECK(doc["schema"] == std::string(kModelSchema));
    const auto back = model_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.k() == 5);
    CHECK(back.train().mode() == ScalingMode::ZScore);
    CHECK(back.train().scaling().factor == m.train().scaling().factor);
    for (int i = 0; i < 30; ++i) {
        const auto q = random_point(rng);
        const auto query = fv(q[0], q[1], q[2], C0);
        CHECK(back.classify(query).label == m.classify(query).label);
    }

    auto bad = doc;
    bad["schema"] = "other/2";
    CHECK_SWD_ERROR(model_from_json(bad), ErrorCode::BadModel);
    auto missing = doc;
    missing.erase("points");
    CHECK_SWD_ERROR(model_from_json(missing), ErrorCode::BadModel);
    auto wrong_counts = doc;
    wrong_counts["n0"] = 1000;
    CHECK_SWD_ERROR(model_from_json(wrong_counts), ErrorCode::BadModel);
}

}
