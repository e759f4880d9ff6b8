#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace swd {

/// Rectangular sliding window; defaults are 2 s windows with 1 s overlap.
struct WindowSpec {
    double window_s = 2.0;
    double overlap_s = 1.0;

    /// Throws BadWindowSpec unless 0 <= overlap_s < window_s.
    void validate() const;
};

/// Window length and hop in samples for a given rate.
struct WindowGeometry {
    std::size_t length = 0;
    std::size_t hop = 0;
};

WindowGeometry window_geometry(double rate_hz, const WindowSpec& spec);

/// floor((N - L) / H) + 1, or 0 when N < L.
std::size_t segment_count(std::size_t n_samples, const WindowGeometry& geometry);

struct Segment {
    std::string channel_label;
    std::size_t start_index = 0;
    std::vector<double> samples;
    double sample_rate_hz = 0.0;

    double start_s() const noexcept { return static_cast<double>(start_index) / sample_rate_hz; }
};

/// Windows [tH, tH + L) for t = 0, 1, ...; a trailing partial window is
/// dropped. Throws SignalTooShort when the signal is shorter than one window.
std::vector<Segment> segment_channel(std::span<const double> samples, double rate_hz, const WindowSpec& spec,
                                     const std::string& channel_label = {});

}  // namespace swd
