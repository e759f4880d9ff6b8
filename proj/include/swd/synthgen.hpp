#pragma once

#include "swd/signal_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace swd {

/// Parameters of one synthetic channel. Amplitudes are in microvolts.
struct SynthSpec {
    double sample_rate_hz = 256.0;
    double swd_freq_hz = 3.0;    // discharge repetition rate, within [1, 3] Hz
    double spike_amp_uv = 120.0;
    double wave_amp_uv = 80.0;
    double noise_amp_uv = 20.0;  // RMS of the background
    double duration_s = 2.0;
    double phase_s = 0.0;        // time of the first discharge period
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;
    std::size_t sample_count() const;
};

// Shape constants of one spike-wave complex, relative to the period start.
inline constexpr double kSpikeCenterS = 0.040;
inline constexpr double kSpikeFwhmS = 0.030;
inline constexpr double kWaveOnsetS = 0.080;
inline constexpr double kWaveFraction = 0.6;  // slow wave duration / period

/// Noiseless discharge train at continuous time t: a Gaussian spike followed
/// by a negative half-sine slow wave in every period.
double swd_waveform(double t, const SynthSpec& spec) noexcept;

/// Zero-mean 1/f noise of the given RMS, high-passed at 0.5 Hz and clipped at
/// 6 RMS.
std::vector<double> pink_noise(std::size_t n, double rms, std::uint64_t seed, double sample_rate_hz = 256.0);

std::vector<double> gen_swd_channel(const SynthSpec& spec);

/// Pink noise plus a weak 10 Hz alpha rhythm, scaled to RMS noise_amp_uv.
std::vector<double> gen_background_channel(const SynthSpec& spec);

/// Per-instance randomization ranges for gen_dataset. Amplitude ranges are
/// multipliers on the base spec.
struct DatasetSpec {
    SynthSpec base;
    std::string channel_label = "Cz";
    double swd_freq_min_hz = 2.0;
    double swd_freq_max_hz = 3.0;
    double swd_amp_jitter_lo = 0.75;
    double swd_amp_jitter_hi = 1.25;
    double swd_noise_jitter_lo = 0.75;
    double swd_noise_jitter_hi = 1.25;
    double bg_noise_jitter_lo = 0.75;
    double bg_noise_jitter_hi = 1.75;
};

struct LabeledRecording {
    std::string name;
    ClassLabel label;
    EegRecording recording;
    std::vector<Annotation> annotations;
};

/// n_swd discharge recordings followed by n_bg background recordings, each
/// base.duration_s long with one annotation covering the whole recording.
std::vector<LabeledRecording> gen_dataset(std::size_t n_swd, std::size_t n_bg, std::uint64_t seed,
                                          const DatasetSpec& spec = {});

struct Episode {
    double onset_s;
    double duration_s;
};

/// One long channel of background with discharges superposed during each
/// episode; annotations mark the episodes as SWD.
LabeledRecording gen_episode_recording(const SynthSpec& spec, const std::vector<Episode>& episodes,
                                       const std::string& channel_label = "Cz");

/// Writes <name>.csv / <name>.json per recording plus manifest.json.
void write_dataset(const std::vector<LabeledRecording>& dataset, const std::filesystem::path& dir);

struct ManifestEntry {
    std::filesystem::path recording_csv;
    std::filesystem::path annotations_json;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir);

/// splitmix64, used to derive independent per-instance seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace swd
