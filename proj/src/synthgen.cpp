#include "swd/synthgen.hpp"

#include "swd/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace swd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAlphaHz = 10.0;
constexpr double kAlphaPowerShare = 0.25;
constexpr std::size_t kPinkBurnIn = 8192;
constexpr double kHighPassHz = 0.5;  // conventional EEG acquisition corner

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double rms_of(const std::vector<double>& x) {
    double ss = 0.0;
    for (const double v : x) ss += v * v;
    return x.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void SynthSpec::validate() const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw Error(ErrorCode::InvalidArgument, "synthetic sample rate must be positive");
    }
    if (!(swd_freq_hz >= 1.0 && swd_freq_hz <= 3.0)) {
        throw Error(ErrorCode::InvalidArgument, "discharge frequency must lie in [1, 3] Hz");
    }
    if (!(spike_amp_uv >= 0.0) || !(wave_amp_uv >= 0.0) || !(noise_amp_uv >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "amplitudes must be non-negative");
    }
    if (!(duration_s > 0.0) || !std::isfinite(duration_s) || !std::isfinite(phase_s)) {
        throw Error(ErrorCode::InvalidArgument, "duration must be positive");
    }
    if (sample_count() == 0) throw Error(ErrorCode::InvalidArgument, "duration shorter than one sample");
}

std::size_t SynthSpec::sample_count() const {
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

double swd_waveform(double t, const SynthSpec& spec) noexcept {
    const double period = 1.0 / spec.swd_freq_hz;
    const double u = t - spec.phase_s;
    const double tau = u - std::floor(u / period) * period;

    const double sigma = kSpikeFwhmS / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    double spike = 0.0;
    for (int shift = -1; shift <= 1; ++shift) {
        const double d = tau - kSpikeCenterS - shift * period;
        spike += std::exp(-0.5 * d * d / (sigma * sigma));
    }

    const double wave_len = kWaveFraction * period;
    double wave = 0.0;
    if (tau >= kWaveOnsetS && tau <= kWaveOnsetS + wave_len) {
        wave = -std::sin(std::numbers::pi * (tau - kWaveOnsetS) / wave_len);
    }
    return spec.spike_amp_uv * spike + spec.wave_amp_uv * wave;
}

std::vector<double> pink_noise(std::size_t n, double rms, std::uint64_t seed, double sample_rate_hz) {
    std::vector<double> out(n, 0.0);
    if (n == 0 || rms == 0.0) return out;

    // First-order high-pass so the 1/f spectrum does not run down to DC.
    const double rc = 1.0 / (kTwoPi * kHighPassHz);
    const double hp = rc / (rc + 1.0 / sample_rate_hz);
    double hp_in = 0.0;
    double hp_out = 0.0;

    // Paul Kellet's refined 1/f filter over white Gaussian input.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> white(0.0, 1.0);
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
    for (std::size_t i = 0; i < n + kPinkBurnIn; ++i) {
        const double w = white(rng);
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
        b6 = w * 0.115926;
        hp_out = hp * (hp_out + pink - hp_in);
        hp_in = pink;
        if (i >= kPinkBurnIn) out[i - kPinkBurnIn] = hp_out;
    }

    double mean = 0.0;
    for (const double v : out) mean += v;
    mean /= static_cast<double>(n);
    for (auto& v : out) v -= mean;
    const double r = rms_of(out);
    if (r > 0.0) {
        for (auto& v : out) v = std::clamp(v * (rms / r), -6.0 * rms, 6.0 * rms);
    }
    return out;
}

std::vector<double> gen_swd_channel(const SynthSpec& spec) {
    spec.validate();
    const auto n = spec.sample_count();
    auto x = pink_noise(n, spec.noise_amp_uv, mix_seed(spec.seed, 1), spec.sample_rate_hz);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] += swd_waveform(static_cast<double>(i) / spec.sample_rate_hz, spec);
    }
    return x;
}

std::vector<double> gen_background_channel(const SynthSpec& spec) {
    spec.validate();
    const auto n = spec.sample_count();
    auto x = pink_noise(n, 1.0, mix_seed(spec.seed, 2), spec.sample_rate_hz);
    if (spec.noise_amp_uv == 0.0) return std::vector<double>(n, 0.0);

    std::mt19937_64 rng(mix_seed(spec.seed, 3));
    const double phase = uniform(rng, 0.0, kTwoPi);
    const double pink_gain = std::sqrt(1.0 - kAlphaPowerShare);
    const double alpha_gain = std::sqrt(2.0 * kAlphaPowerShare);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate_hz;
        x[i] = pink_gain * x[i] + alpha_gain * std::sin(kTwoPi * kAlphaHz * t + phase);
    }
    const double r = rms_of(x);
    for (auto& v : x) v *= spec.noise_amp_uv / r;
    return x;
}

namespace {

std::string instance_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rec_%04zu", i);
    return buf;
}

LabeledRecording whole_record(std::string name, ClassLabel label, double rate, std::vector<double> samples,
                              const std::string& channel) {
    EegRecording rec(rate, {Channel{channel, std::move(samples)}});
    std::vector<Annotation> ann{Annotation{channel, 0.0, rec.duration_s(), label}};
    return LabeledRecording{std::move(name), label, std::move(rec), std::move(ann)};
}

}  // namespace

std::vector<LabeledRecording> gen_dataset(std::size_t n_swd, std::size_t n_bg, std::uint64_t seed,
                                          const DatasetSpec& spec) {
    if (n_swd < 1 || n_bg < 1) throw Error(ErrorCode::InvalidArgument, "dataset needs at least one of each class");
    spec.base.validate();

    std::vector<LabeledRecording> out;
    out.reserve(n_swd + n_bg);
    for (std::size_t i = 0; i < n_swd + n_bg; ++i) {
        std::mt19937_64 rng(mix_seed(seed, i));
        SynthSpec s = spec.base;
        s.seed = mix_seed(seed ^ 0x5744u, i);
        if (i < n_swd) {
            s.swd_freq_hz = uniform(rng, spec.swd_freq_min_hz, spec.swd_freq_max_hz);
            s.spike_amp_uv *= uniform(rng, spec.swd_amp_jitter_lo, spec.swd_amp_jitter_hi);
            s.wave_amp_uv *= uniform(rng, spec.swd_amp_jitter_lo, spec.swd_amp_jitter_hi);
            s.noise_amp_uv *= uniform(rng, spec.swd_noise_jitter_lo, spec.swd_noise_jitter_hi);
            s.phase_s = uniform(rng, 0.0, 1.0 / s.swd_freq_hz);
            out.push_back(whole_record(instance_name(i), ClassLabel::Swd, s.sample_rate_hz, gen_swd_channel(s),
                                       spec.channel_label));
        } else {
            s.noise_amp_uv *= uniform(rng, spec.bg_noise_jitter_lo, spec.bg_noise_jitter_hi);
            out.push_back(whole_record(instance_name(i), ClassLabel::NonSwd, s.sample_rate_hz,
                                       gen_background_channel(s), spec.channel_label));
        }
    }
    return out;
}

LabeledRecording gen_episode_recording(const SynthSpec& spec, const std::vector<Episode>& episodes,
                                       const std::string& channel_label) {
    spec.validate();
    auto x = gen_background_channel(spec);
    const double rate = spec.sample_rate_hz;
    std::vector<Annotation> ann;
    for (const auto& ep : episodes) {
        if (ep.onset_s < 0.0 || !(ep.duration_s > 0.0) || ep.onset_s + ep.duration_s > spec.duration_s) {
            throw Error(ErrorCode::OutOfRange, "episode outside the recording");
        }
        SynthSpec s = spec;
        s.phase_s = ep.onset_s;
        const auto lo = static_cast<std::size_t>(std::ceil(ep.onset_s * rate));
        const auto hi = std::min(x.size(), static_cast<std::size_t>(std::floor((ep.onset_s + ep.duration_s) * rate)));
        for (std::size_t i = lo; i < hi; ++i) x[i] += swd_waveform(static_cast<double>(i) / rate, s);
        ann.push_back(Annotation{channel_label, ep.onset_s, ep.duration_s, ClassLabel::Swd});
    }
    EegRecording rec(rate, {Channel{channel_label, std::move(x)}});
    return LabeledRecording{"episodes", ClassLabel::Swd, std::move(rec), std::move(ann)};
}

void write_dataset(const std::vector<LabeledRecording>& dataset, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + dir.string() + "'");
    auto manifest = nlohmann::json::array();
    for (const auto& item : dataset) {
        const auto csv = item.name + ".csv";
        const auto json = item.name + ".json";
        save_recording_csv(item.recording, dir / csv);
        save_annotations_json(item.annotations, dir / json);
        manifest.push_back({{"recording", csv}, {"annotations", json}, {"label", std::string(label_name(item.label))}});
    }
    write_text_file(dir / "manifest.json", nlohmann::json{{"recordings", manifest}}.dump(2) + "\n");
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
        std::vector<ManifestEntry> out;
        for (const auto& item : doc.at("recordings")) {
            out.push_back({dir / item.at("recording").get<std::string>(), dir / item.at("annotations").get<std::string>()});
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedJson, std::string("manifest: ") + e.what());
    }
}

}  // namespace swd
