#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swd {

/// Binary detection target. Numeric values follow the class indices used by
/// the classifier (non-SWD = 0, SWD = 1).
enum class ClassLabel : int { NonSwd = 0, Swd = 1 };

constexpr int class_index(ClassLabel c) noexcept { return static_cast<int>(c); }

/// "swd" / "non-swd", the spelling used in every on-disk format.
std::string_view label_name(ClassLabel c) noexcept;

/// Parses "swd" / "non-swd" (also accepts "1" / "0"); nullopt otherwise.
std::optional<ClassLabel> parse_label(std::string_view text) noexcept;

/// One channel of samples in microvolts.
struct Channel {
    std::string label;
    std::vector<double> samples;
};

/// Multichannel recording, N samples on each of M channels. Immutable once
/// constructed; the constructor enforces equal lengths, unique labels and a
/// positive sample rate.
class EegRecording {
public:
    EegRecording(double sample_rate_hz, std::vector<Channel> channels);

    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    std::size_t sample_count() const noexcept;
    std::size_t channel_count() const noexcept { return channels_.size(); }
    double duration_s() const noexcept { return static_cast<double>(sample_count()) / sample_rate_hz_; }

    const std::vector<Channel>& channels() const noexcept { return channels_; }
    const Channel* find_channel(std::string_view label) const noexcept;

private:
    double sample_rate_hz_;
    std::vector<Channel> channels_;
};

struct Annotation {
    std::string channel_label;
    double onset_s = 0.0;
    double duration_s = 0.0;
    ClassLabel label = ClassLabel::NonSwd;
};

EegRecording load_recording_csv(const std::filesystem::path& path);
EegRecording parse_recording_csv(std::string_view text);

/// Writes `time_s,<labels...>` followed by one row per sample. Values are
/// printed in shortest round-trip form so a reload is bit-exact.
void save_recording_csv(const EegRecording& rec, const std::filesystem::path& path);
std::string format_recording_csv(const EegRecording& rec);

std::vector<Annotation> load_annotations_json(const std::filesystem::path& path, const EegRecording& rec);
std::vector<Annotation> parse_annotations_json(std::string_view text, const EegRecording& rec);

void save_annotations_json(const std::vector<Annotation>& annotations, const std::filesystem::path& path);
std::string format_annotations_json(const std::vector<Annotation>& annotations);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace swd
