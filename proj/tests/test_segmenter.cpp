#include "swd/segmenter.hpp"

#include "test_util.hpp"

#include <numeric>
#include <random>

using namespace swd;

namespace {

std::vector<double> ramp(std::size_t n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.0);
    return v;
}

}  // namespace

TEST_SUITE("segmenter") {

TEST_CASE("2 s windows with 1 s overlap at 256 Hz") {
    const auto x = ramp(1024);
    const auto segs = segment_channel(x, 256.0, {}, "Cz");
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].start_index == 0);
    CHECK(segs[1].start_index == 256);
    CHECK(segs[2].start_index == 512);
    for (const auto& s : segs) {
        CHECK(s.samples.size() == 512);
        CHECK(s.channel_label == "Cz");
    }
    CHECK(segs[1].start_s() == doctest::Approx(1.0));
}

TEST_CASE("window-length boundary") {
    CHECK(segment_channel(ramp(512), 256.0, {}).size() == 1);
    CHECK_SWD_ERROR(segment_channel(ramp(511), 256.0, {}), ErrorCode::SignalTooShort);
}

TEST_CASE("window spec validation") {
    CHECK_SWD_ERROR((WindowSpec{2.0, 2.0}.validate()), ErrorCode::BadWindowSpec);
    CHECK_SWD_ERROR((WindowSpec{2.0, -0.5}.validate()), ErrorCode::BadWindowSpec);
    CHECK_SWD_ERROR((WindowSpec{0.0, 0.0}.validate()), ErrorCode::BadWindowSpec);
    CHECK_NOTHROW((WindowSpec{2.0, 0.0}.validate()));
}

TEST_CASE("segments are pure selections of the source") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise;
    std::vector<double> x(3000);
    for (auto& v : x) v = noise(rng);
    const auto segs = segment_channel(x, 200.0, {1.5, 0.5});
    for (const auto& s : segs) {
        for (std::size_t i = 0; i < s.samples.size(); ++i) REQUIRE(s.samples[i] == x[s.start_index + i]);
    }
}

TEST_CASE("non-overlapping halves reconstruct the covered prefix") {
    const auto x = ramp(256 * 9 + 100);
    const auto segs = segment_channel(x, 256.0, {});
    std::vector<double> rebuilt(segs[0].samples.begin(), segs[0].samples.begin() + 256);
    for (const auto& s : segs) rebuilt.insert(rebuilt.end(), s.samples.begin() + 256, s.samples.end());
    const auto covered = segs.back().start_index + segs.back().samples.size();
    REQUIRE(rebuilt.size() == covered);
    CHECK(std::equal(rebuilt.begin(), rebuilt.end(), x.begin()));
}

TEST_CASE("segment count formula holds for random geometry") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rate_dist(32.0, 1024.0);
    std::uniform_real_distribution<double> win_dist(0.25, 4.0);
    std::uniform_real_distribution<double> frac(0.0, 0.95);
    for (int trial = 0; trial < 300; ++trial) {
        const double rate = rate_dist(rng);
        const WindowSpec spec{win_dist(rng), 0.0};
        WindowSpec s = spec;
        s.overlap_s = frac(rng) * s.window_s;
        WindowGeometry g;
        try {
            g = window_geometry(rate, s);
        } catch (const Error&) {
            continue;  // hop rounded to zero
        }
        const auto n = g.length + static_cast<std::size_t>(rng() % 5000);
        const auto segs = segment_channel(ramp(n), rate, s);
        CHECK(segs.size() == (n - g.length) / g.hop + 1);
        CHECK(segs.back().start_index + g.length <= n);
        CHECK(segs.size() == segment_count(n, g));
    }
}

}
