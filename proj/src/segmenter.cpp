#include "swd/segmenter.hpp"

#include "swd/error.hpp"

#include <cmath>

namespace swd {

void WindowSpec::validate() const {
    if (!std::isfinite(window_s) || !std::isfinite(overlap_s) || !(window_s > 0.0) || overlap_s < 0.0 ||
        !(overlap_s < window_s)) {
        throw Error(ErrorCode::BadWindowSpec, "window spec needs 0 <= overlap_s < window_s");
    }
}

WindowGeometry window_geometry(double rate_hz, const WindowSpec& spec) {
    spec.validate();
    if (!(rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
    WindowGeometry g;
    g.length = static_cast<std::size_t>(std::llround(spec.window_s * rate_hz));
    g.hop = static_cast<std::size_t>(std::llround((spec.window_s - spec.overlap_s) * rate_hz));
    if (g.length == 0 || g.hop == 0) {
        throw Error(ErrorCode::BadWindowSpec, "window or hop rounds to zero samples at this rate");
    }
    return g;
}

std::size_t segment_count(std::size_t n_samples, const WindowGeometry& geometry) {
    if (n_samples < geometry.length) return 0;
    return (n_samples - geometry.length) / geometry.hop + 1;
}

std::vector<Segment> segment_channel(std::span<const double> samples, double rate_hz, const WindowSpec& spec,
                                     const std::string& channel_label) {
    const auto g = window_geometry(rate_hz, spec);
    if (samples.size() < g.length) {
        throw Error(ErrorCode::SignalTooShort, "signal has " + std::to_string(samples.size()) +
                                                   " samples, a window needs " + std::to_string(g.length));
    }
    const auto count = segment_count(samples.size(), g);
    std::vector<Segment> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const auto start = t * g.hop;
        const auto window = samples.subspan(start, g.length);
        out.push_back(Segment{channel_label, start, std::vector<double>(window.begin(), window.end()), rate_hz});
    }
    return out;
}

}  // namespace swd
