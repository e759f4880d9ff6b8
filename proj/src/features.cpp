#include "swd/features.hpp"

#include "swd/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace swd {

double population_variance(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "variance of an empty sample");
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

FeatureVector extract_features(std::span<const double> pooled, const GgdSolverOptions& opts) {
    FeatureVector fv;
    try {
        fv.ggd_scale = fit_ggd_mle(pooled, opts).scale;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateData) throw Error(ErrorCode::DegenerateCoefficients, e.what());
        throw;
    }
    fv.variance = population_variance(pooled);
    fv.median = median(pooled);
    return fv;
}

FeatureVector extract_features(const WaveletCoefficients& coeffs, const GgdSolverOptions& opts) {
    auto fv = extract_features(std::span<const double>(coeffs.values), opts);
    fv.channel_label = coeffs.channel_label;
    fv.segment_start_index = coeffs.segment_start_index;
    return fv;
}

const FeatureEnvelope& reference_envelope(ClassLabel c) noexcept {
    static const FeatureEnvelope non_swd{{12.0, 1300.0}, {950.0, 32e6}, {-28e3, 22e3}};
    static const FeatureEnvelope swd{{31.0, 1800.0}, {2800.0, 43e6}, {-73e3, 74e3}};
    return c == ClassLabel::Swd ? swd : non_swd;
}

EnvelopeReport check_table1_bounds(const FeatureVector& fv, ClassLabel label) noexcept {
    const auto& env = reference_envelope(label);
    return {env.ggd_scale.contains(fv.ggd_scale), env.variance.contains(fv.variance), env.median.contains(fv.median)};
}

std::string format_features_csv(std::span<const FeatureVector> features) {
    std::string out = "channel,start_index,sigma,variance,median,label\n";
    for (const auto& f : features) {
        out += f.channel_label;
        out += ',';
        out += std::to_string(f.segment_start_index);
        out += ',';
        out += format_double(f.ggd_scale);
        out += ',';
        out += format_double(f.variance);
        out += ',';
        out += format_double(f.median);
        out += ',';
        if (f.label) out += label_name(*f.label);
        out += '\n';
    }
    return out;
}

namespace {

double parse_cell(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::MalformedCsv, "bad number '" + cell + "' on line " + std::to_string(line_no));
    }
    return v;
}

}  // namespace

std::vector<FeatureVector> parse_features_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyFile, "feature file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "channel,start_index,sigma,variance,median,label") {
        throw Error(ErrorCode::MalformedCsv, "feature header must be channel,start_index,sigma,variance,median,label");
    }
    std::vector<FeatureVector> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (cells.size() != 6) {
            throw Error(ErrorCode::MalformedCsv, "feature row on line " + std::to_string(line_no) + " needs 6 cells");
        }
        FeatureVector f;
        f.channel_label = cells[0];
        std::size_t start = 0;
        const auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), start);
        if (ec != std::errc{} || ptr != cells[1].data() + cells[1].size()) {
            throw Error(ErrorCode::MalformedCsv, "bad start_index on line " + std::to_string(line_no));
        }
        f.segment_start_index = start;
        f.ggd_scale = parse_cell(cells[2], line_no);
        f.variance = parse_cell(cells[3], line_no);
        f.median = parse_cell(cells[4], line_no);
        if (!cells[5].empty()) {
            f.label = parse_label(cells[5]);
            if (!f.label) throw Error(ErrorCode::BadLabel, "bad label '" + cells[5] + "' on line " + std::to_string(line_no));
        }
        out.push_back(std::move(f));
    }
    return out;
}

void save_features_csv(std::span<const FeatureVector> features, const std::filesystem::path& path) {
    write_text_file(path, format_features_csv(features));
}

std::vector<FeatureVector> load_features_csv(const std::filesystem::path& path) {
    return parse_features_csv(read_text_file(path));
}

}  // namespace swd
