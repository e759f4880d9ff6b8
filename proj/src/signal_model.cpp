#include "swd/signal_model.hpp"

#include "swd/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace swd {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

double median_of(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

std::string_view label_name(ClassLabel c) noexcept {
    return c == ClassLabel::Swd ? "swd" : "non-swd";
}

std::optional<ClassLabel> parse_label(std::string_view text) noexcept {
    text = trim(text);
    if (text == "swd" || text == "1") return ClassLabel::Swd;
    if (text == "non-swd" || text == "0") return ClassLabel::NonSwd;
    return std::nullopt;
}

EegRecording::EegRecording(double sample_rate_hz, std::vector<Channel> channels)
    : sample_rate_hz_(sample_rate_hz), channels_(std::move(channels)) {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
        throw Error(ErrorCode::InvalidArgument, "sample rate must be positive and finite");
    }
    if (channels_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "recording needs at least one channel");
    }
    const auto n = channels_.front().samples.size();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "recording needs at least one sample");
    std::set<std::string_view> seen;
    for (const auto& ch : channels_) {
        if (ch.samples.size() != n) {
            throw Error(ErrorCode::InvalidArgument, "channel '" + ch.label + "' has a different sample count");
        }
        if (!seen.insert(ch.label).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate channel label '" + ch.label + "'");
        }
    }
}

std::size_t EegRecording::sample_count() const noexcept {
    return channels_.front().samples.size();
}

const Channel* EegRecording::find_channel(std::string_view label) const noexcept {
    for (const auto& ch : channels_) {
        if (ch.label == label) return &ch;
    }
    return nullptr;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format number");
    return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

EegRecording parse_recording_csv(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw Error(ErrorCode::EmptyFile, "recording file is empty");

    const auto header = split(trim(lines.front()), ',');
    if (header.size() < 2 || trim(header.front()) != "time_s") {
        throw Error(ErrorCode::MalformedCsv, "header must be 'time_s,<label>,...'");
    }
    if (lines.size() == 1) throw Error(ErrorCode::EmptyFile, "recording file has a header but no samples");
    if (lines.size() < 3) throw Error(ErrorCode::MalformedCsv, "at least two samples are needed to infer the rate");

    const std::size_t n_channels = header.size() - 1;
    std::vector<Channel> channels(n_channels);
    for (std::size_t c = 0; c < n_channels; ++c) {
        channels[c].label = std::string(trim(header[c + 1]));
        if (channels[c].label.empty()) throw Error(ErrorCode::MalformedCsv, "empty channel label");
        channels[c].samples.reserve(lines.size() - 1);
    }

    std::vector<double> times;
    times.reserve(lines.size() - 1);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto cells = split(trim(lines[row]), ',');
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(row + 1) + " has " +
                                                     std::to_string(cells.size()) + " cells, expected " +
                                                     std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto value = parse_number(cells[c]);
            if (!value) {
                throw Error(ErrorCode::MalformedCsv, "non-numeric cell at row " + std::to_string(row + 1) +
                                                         ", column " + std::to_string(c + 1));
            }
            if (c == 0) {
                times.push_back(*value);
            } else {
                channels[c - 1].samples.push_back(*value);
            }
        }
    }

    std::vector<double> deltas(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) {
        deltas[i - 1] = times[i] - times[i - 1];
        if (!(deltas[i - 1] > 0.0)) {
            throw Error(ErrorCode::MalformedCsv, "time column is not strictly increasing at row " + std::to_string(i + 2));
        }
    }
    const double dt = median_of(deltas);
    for (const double d : deltas) {
        if (std::abs(d - dt) > 0.01 * dt) {
            throw Error(ErrorCode::InconsistentRate, "sample interval deviates more than 1% from the median");
        }
    }
    return EegRecording(1.0 / dt, std::move(channels));
}

EegRecording load_recording_csv(const std::filesystem::path& path) {
    return parse_recording_csv(read_text_file(path));
}

std::string format_recording_csv(const EegRecording& rec) {
    std::string out = "time_s";
    for (const auto& ch : rec.channels()) {
        out += ',';
        out += ch.label;
    }
    out += '\n';
    const double dt = 1.0 / rec.sample_rate_hz();
    for (std::size_t i = 0; i < rec.sample_count(); ++i) {
        out += format_double(static_cast<double>(i) * dt);
        for (const auto& ch : rec.channels()) {
            out += ',';
            out += format_double(ch.samples[i]);
        }
        out += '\n';
    }
    return out;
}

void save_recording_csv(const EegRecording& rec, const std::filesystem::path& path) {
    write_text_file(path, format_recording_csv(rec));
}

std::vector<Annotation> parse_annotations_json(std::string_view text, const EegRecording& rec) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, std::string("annotation JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::MalformedJson, "annotation JSON must be an array");

    const double duration = rec.duration_s();
    std::vector<Annotation> out;
    out.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("channel") || !item.contains("onset_s") ||
            !item.contains("duration_s") || !item.contains("label") || !item["channel"].is_string() ||
            !item["onset_s"].is_number() || !item["duration_s"].is_number()) {
            throw Error(ErrorCode::MalformedJson, "annotation needs channel, onset_s, duration_s and label");
        }
        Annotation a;
        a.channel_label = item["channel"].get<std::string>();
        a.onset_s = item["onset_s"].get<double>();
        a.duration_s = item["duration_s"].get<double>();

        const auto& label = item["label"];
        if (label == "swd") {
            a.label = ClassLabel::Swd;
        } else if (label == "non-swd") {
            a.label = ClassLabel::NonSwd;
        } else {
            throw Error(ErrorCode::BadLabel, "annotation label must be \"swd\" or \"non-swd\"");
        }

        if (rec.find_channel(a.channel_label) == nullptr) {
            throw Error(ErrorCode::UnknownChannel, "annotation references unknown channel '" + a.channel_label + "'");
        }
        if (a.onset_s < 0.0 || !(a.duration_s > 0.0) || a.onset_s + a.duration_s > duration * (1.0 + 1e-12)) {
            throw Error(ErrorCode::OutOfRange, "annotation [" + format_double(a.onset_s) + ", +" +
                                                   format_double(a.duration_s) + "] s exceeds the recording (" +
                                                   format_double(duration) + " s)");
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Annotation> load_annotations_json(const std::filesystem::path& path, const EegRecording& rec) {
    return parse_annotations_json(read_text_file(path), rec);
}

std::string format_annotations_json(const std::vector<Annotation>& annotations) {
    auto doc = nlohmann::json::array();
    for (const auto& a : annotations) {
        doc.push_back({{"channel", a.channel_label},
                       {"onset_s", a.onset_s},
                       {"duration_s", a.duration_s},
                       {"label", std::string(label_name(a.label))}});
    }
    return doc.dump(2) + "\n";
}

void save_annotations_json(const std::vector<Annotation>& annotations, const std::filesystem::path& path) {
    write_text_file(path, format_annotations_json(annotations));
}

}  // namespace swd
