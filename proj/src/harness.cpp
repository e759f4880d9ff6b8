#include "swd/harness.hpp"

#include "swd/error.hpp"
#include "swd/morlet.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace swd {

nlohmann::json pipeline_to_json(const PipelineConfig& cfg) {
    return {{"window_s", cfg.window.window_s},
            {"overlap_s", cfg.window.overlap_s},
            {"f_min_hz", cfg.f_min_hz},
            {"f_max_hz", cfg.f_max_hz},
            {"n_scales", cfg.n_scales}};
}

PipelineConfig pipeline_from_json(const nlohmann::json& doc) {
    PipelineConfig cfg;
    cfg.window.window_s = doc.value("window_s", cfg.window.window_s);
    cfg.window.overlap_s = doc.value("overlap_s", cfg.window.overlap_s);
    cfg.f_min_hz = doc.value("f_min_hz", cfg.f_min_hz);
    cfg.f_max_hz = doc.value("f_max_hz", cfg.f_max_hz);
    cfg.n_scales = doc.value("n_scales", cfg.n_scales);
    cfg.window.validate();
    return cfg;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

ClassLabel window_label(const std::vector<Annotation>& annotations, const std::string& channel, double start_s,
                        double window_s) {
    const double end_s = start_s + window_s;
    std::vector<std::pair<double, double>> spans;
    for (const auto& a : annotations) {
        if (a.label != ClassLabel::Swd || a.channel_label != channel) continue;
        const double lo = std::max(start_s, a.onset_s);
        const double hi = std::min(end_s, a.onset_s + a.duration_s);
        if (hi > lo) spans.emplace_back(lo, hi);
    }
    std::sort(spans.begin(), spans.end());
    double covered = 0.0;
    double reach = start_s;
    for (const auto& [lo, hi] : spans) {
        const double from = std::max(lo, reach);
        if (hi > from) covered += hi - from;
        reach = std::max(reach, hi);
    }
    return covered >= 0.5 * window_s * (1.0 - 1e-12) ? ClassLabel::Swd : ClassLabel::NonSwd;
}

std::vector<WindowResult> featurize_recording(const EegRecording& rec, const std::vector<Annotation>* annotations,
                                              const PipelineConfig& cfg, unsigned threads) {
    const double rate = rec.sample_rate_hz();
    const auto geometry = window_geometry(rate, cfg.window);
    const auto grid = build_scale_grid(rate, cfg.f_min_hz, cfg.f_max_hz, cfg.n_scales);

    std::vector<Segment> segments;
    for (const auto& ch : rec.channels()) {
        auto segs = segment_channel(ch.samples, rate, cfg.window, ch.label);
        std::move(segs.begin(), segs.end(), std::back_inserter(segments));
    }

    const double window_s = static_cast<double>(geometry.length) / rate;
    std::vector<WindowResult> results(segments.size());
    parallel_for(
        segments.size(),
        [&](std::size_t i) {
            const auto& seg = segments[i];
            auto& r = results[i];
            r.channel = seg.channel_label;
            r.start_index = seg.start_index;
            r.start_s = seg.start_s();
            try {
                auto fv = extract_features(cwt(seg, grid), cfg.ggd);
                if (annotations != nullptr) fv.label = window_label(*annotations, seg.channel_label, r.start_s, window_s);
                r.features = std::move(fv);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateCoefficients) throw;
                r.skip_reason = std::string(to_string(e.code()));
            }
        },
        threads);

    for (const auto& r : results) {
        if (r.skipped()) {
            spdlog::info("skipped window {}@{}: {}", r.channel, r.start_index, r.skip_reason);
        }
    }
    return results;
}

std::vector<FeatureVector> featurize_dataset(const std::vector<LabeledRecording>& dataset, const PipelineConfig& cfg,
                                             unsigned threads) {
    std::vector<std::vector<WindowResult>> per_item(dataset.size());
    parallel_for(
        dataset.size(),
        [&](std::size_t i) { per_item[i] = featurize_recording(dataset[i].recording, &dataset[i].annotations, cfg, 1); },
        threads);
    std::vector<FeatureVector> out;
    for (auto& windows : per_item) {
        for (auto& w : windows) {
            if (!w.skipped()) out.push_back(std::move(*w.features));
        }
    }
    return out;
}

KnnModel train(std::vector<FeatureVector> features, const TrainOptions& opts) {
    if (opts.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    if (features.size() < opts.k) {
        throw Error(ErrorCode::TooFewPoints, "need at least k=" + std::to_string(opts.k) + " training vectors, got " +
                                                 std::to_string(features.size()));
    }
    for (const auto& f : features) {
        if (!f.label) throw Error(ErrorCode::InvalidArgument, "training vectors must be labeled");
    }
    const bool has0 = std::any_of(features.begin(), features.end(), [](const auto& f) { return *f.label == ClassLabel::NonSwd; });
    const bool has1 = std::any_of(features.begin(), features.end(), [](const auto& f) { return *f.label == ClassLabel::Swd; });
    if (!has0 || !has1) throw Error(ErrorCode::SingleClass, "training data must contain both classes");
    return KnnModel(TrainingSet::build(std::move(features), opts.scaling), opts.k);
}

KnnModel augment_patient(const KnnModel& model, std::span<const FeatureVector> new_swd) {
    if (new_swd.size() < kMinAugment) {
        throw Error(ErrorCode::TooFewAugment, "patient augmentation needs at least " + std::to_string(kMinAugment) +
                                                  " SWD vectors, got " + std::to_string(new_swd.size()));
    }
    std::vector<FeatureVector> points = model.train().points();
    for (const auto& f : new_swd) {
        if (f.label && *f.label != ClassLabel::Swd) {
            throw Error(ErrorCode::InvalidArgument, "augmentation vectors must be SWD");
        }
        auto copy = f;
        copy.label = ClassLabel::Swd;
        points.push_back(std::move(copy));
    }
    return train(std::move(points), TrainOptions{model.k(), model.train().mode()});
}

double SegmentPrediction::posterior_ratio() const noexcept {
    if (votes_swd == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(votes_non_swd) / static_cast<double>(votes_swd);
}

EvalReport make_report(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
    EvalReport r;
    r.tp = tp;
    r.tn = tn;
    r.fp = fp;
    r.fn = fn;
    const auto total = tp + tn + fp + fn;
    r.accuracy = total == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fn > 0) r.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp > 0) r.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return r;
}

EvalReport evaluate(const KnnModel& model, std::span<const FeatureVector> test) {
    if (test.empty()) throw Error(ErrorCode::EmptyTestSet, "test set is empty");
    std::vector<SegmentPrediction> preds(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (!test[i].label) throw Error(ErrorCode::InvalidArgument, "test vectors must be labeled");
        const auto d = model.classify(test[i]);
        preds[i] = SegmentPrediction{i, test[i].channel_label, test[i].segment_start_index, *test[i].label, d.label,
                                     d.votes_non_swd, d.votes_swd};
    }
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (const auto& p : preds) {
        const bool truth = p.truth == ClassLabel::Swd;
        const bool pred = p.predicted == ClassLabel::Swd;
        tp += truth && pred;
        tn += !truth && !pred;
        fp += !truth && pred;
        fn += truth && !pred;
    }
    auto report = make_report(tp, tn, fp, fn);
    report.per_segment = std::move(preds);
    return report;
}

nlohmann::json report_to_json(const EvalReport& report, bool include_segments) {
    auto optional_metric = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json doc = {{"tp", report.tp},
                          {"tn", report.tn},
                          {"fp", report.fp},
                          {"fn", report.fn},
                          {"accuracy", report.accuracy},
                          {"sensitivity", optional_metric(report.sensitivity)},
                          {"specificity", optional_metric(report.specificity)},
                          {"n", report.tp + report.tn + report.fp + report.fn}};
    if (include_segments) {
        auto segs = nlohmann::json::array();
        for (const auto& p : report.per_segment) {
            const double ratio = p.posterior_ratio();
            segs.push_back({{"id", p.id},
                            {"channel", p.channel},
                            {"start_index", p.start_index},
                            {"truth", std::string(label_name(p.truth))},
                            {"predicted", std::string(label_name(p.predicted))},
                            {"posterior_ratio", std::isfinite(ratio) ? nlohmann::json(ratio) : nlohmann::json(nullptr)}});
        }
        doc["per_segment"] = std::move(segs);
    }
    return doc;
}

std::string format_predictions_csv(const EvalReport& report) {
    std::string out = "id,channel,start_index,truth,predicted,votes_non_swd,votes_swd,posterior_ratio\n";
    for (const auto& p : report.per_segment) {
        out += std::to_string(p.id) + ',' + p.channel + ',' + std::to_string(p.start_index) + ',' +
               std::string(label_name(p.truth)) + ',' + std::string(label_name(p.predicted)) + ',' +
               std::to_string(p.votes_non_swd) + ',' + std::to_string(p.votes_swd) + ',';
        const double ratio = p.posterior_ratio();
        out += std::isfinite(ratio) ? format_double(ratio) : std::string("inf");
        out += '\n';
    }
    return out;
}

std::vector<WindowResult> run_pipeline(const EegRecording& rec, const KnnModel& model, const PipelineConfig& cfg,
                                       unsigned threads) {
    auto results = featurize_recording(rec, nullptr, cfg, threads);
    for (auto& r : results) {
        if (!r.skipped()) r.decision = model.classify(*r.features);
    }
    return results;
}

std::string format_stream_csv(const std::vector<WindowResult>& results) {
    std::string out = "channel,start_index,start_s,status,label,votes_non_swd,votes_swd,sigma,variance,median\n";
    for (const auto& r : results) {
        out += r.channel + ',' + std::to_string(r.start_index) + ',' + format_double(r.start_s) + ',';
        if (r.skipped()) {
            out += "skipped:" + r.skip_reason + ",,,,,,\n";
            continue;
        }
        out += "ok,";
        if (r.decision) {
            out += std::string(label_name(r.decision->label)) + ',' + std::to_string(r.decision->votes_non_swd) + ',' +
                   std::to_string(r.decision->votes_swd) + ',';
        } else {
            out += ",,,";
        }
        out += format_double(r.features->ggd_scale) + ',' + format_double(r.features->variance) + ',' +
               format_double(r.features->median) + '\n';
    }
    return out;
}

void save_model(const KnnModel& model, const PipelineConfig& cfg, const std::filesystem::path& path) {
    auto doc = model_to_json(model);
    doc["pipeline"] = pipeline_to_json(cfg);
    write_text_file(path, doc.dump(2) + "\n");
}

LoadedModel load_model(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::BadModel, std::string("model JSON: ") + e.what());
    }
    auto model = model_from_json(doc);
    PipelineConfig cfg;
    if (doc.contains("pipeline")) {
        try {
            cfg = pipeline_from_json(doc["pipeline"]);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::BadModel, std::string("model pipeline: ") + e.what());
        }
    }
    return LoadedModel{std::move(model), cfg};
}

EvalReport run_end_to_end(const EndToEndOptions& opts) {
    if (opts.n_test < 2) throw Error(ErrorCode::InvalidArgument, "test set needs at least two segments");
    const auto train_set = gen_dataset(opts.n_train_swd, opts.n_train_bg, opts.seed, opts.dataset);
    const std::size_t test_swd = (opts.n_test + 1) / 2;
    const auto test_set = gen_dataset(test_swd, opts.n_test - test_swd, mix_seed(opts.seed, 0x7e57), opts.dataset);

    auto train_features = featurize_dataset(train_set, opts.pipeline, opts.threads);
    const auto test_features = featurize_dataset(test_set, opts.pipeline, opts.threads);
    const auto model = train(std::move(train_features), opts.train);
    return evaluate(model, test_features);
}

}  // namespace swd
