#pragma once

#include "swd/classifier.hpp"
#include "swd/features.hpp"
#include "swd/segmenter.hpp"
#include "swd/synthgen.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace swd {

/// Everything between a raw channel and its feature vector.
struct PipelineConfig {
    WindowSpec window;
    double f_min_hz = 1.0;
    double f_max_hz = 3.0;
    std::size_t n_scales = 21;
    GgdSolverOptions ggd;
};

nlohmann::json pipeline_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_from_json(const nlohmann::json& doc);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Callers write into per-index slots, so the result does not
/// depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

/// Class 1 iff at least half of [start_s, start_s + window_s) is covered by
/// SWD annotations on `channel`.
ClassLabel window_label(const std::vector<Annotation>& annotations, const std::string& channel, double start_s,
                        double window_s);

struct WindowResult {
    std::string channel;
    std::size_t start_index = 0;
    double start_s = 0.0;
    std::optional<FeatureVector> features;  // empty when the window was skipped
    std::string skip_reason;
    std::optional<KnnDecision> decision;

    bool skipped() const noexcept { return !features.has_value(); }
};

/// Segments every channel and extracts features, in (channel, start_index)
/// order. Windows with degenerate coefficients are kept as skipped entries.
/// When annotations are given each feature vector is labeled.
std::vector<WindowResult> featurize_recording(const EegRecording& rec, const std::vector<Annotation>* annotations,
                                              const PipelineConfig& cfg, unsigned threads = 0);

/// Non-skipped labeled features of every recording, in dataset order.
std::vector<FeatureVector> featurize_dataset(const std::vector<LabeledRecording>& dataset, const PipelineConfig& cfg,
                                             unsigned threads = 0);

struct TrainOptions {
    std::size_t k = 10;
    ScalingMode scaling = ScalingMode::ZScore;
};

/// Throws TooFewPoints (fewer than k vectors) or SingleClass.
KnnModel train(std::vector<FeatureVector> features, const TrainOptions& opts = {});

inline constexpr std::size_t kMinAugment = 10;

/// Adds at least ten SWD vectors from a new patient and refits the scaling.
KnnModel augment_patient(const KnnModel& model, std::span<const FeatureVector> new_swd);

struct SegmentPrediction {
    std::size_t id = 0;
    std::string channel;
    std::size_t start_index = 0;
    ClassLabel truth = ClassLabel::NonSwd;
    ClassLabel predicted = ClassLabel::NonSwd;
    int votes_non_swd = 0;
    int votes_swd = 0;

    /// Vote ratio non-SWD : SWD, the k-NN estimate of the posterior ratio
    /// (infinite when no neighbor votes SWD).
    double posterior_ratio() const noexcept;
};

struct EvalReport {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double accuracy = 0.0;
    std::optional<double> sensitivity;  // absent without positives
    std::optional<double> specificity;  // absent without negatives
    std::vector<SegmentPrediction> per_segment;
};

EvalReport make_report(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

/// Throws EmptyTestSet; every test vector must carry a label.
EvalReport evaluate(const KnnModel& model, std::span<const FeatureVector> test);

nlohmann::json report_to_json(const EvalReport& report, bool include_segments = false);
std::string format_predictions_csv(const EvalReport& report);

/// Featurize and classify every window of every channel.
std::vector<WindowResult> run_pipeline(const EegRecording& rec, const KnnModel& model, const PipelineConfig& cfg,
                                       unsigned threads = 0);

std::string format_stream_csv(const std::vector<WindowResult>& results);

/// Model file: the k-NN model plus the pipeline settings used to build it.
void save_model(const KnnModel& model, const PipelineConfig& cfg, const std::filesystem::path& path);

struct LoadedModel {
    KnnModel model;
    PipelineConfig pipeline;
};

LoadedModel load_model(const std::filesystem::path& path);

struct EndToEndOptions {
    std::uint64_t seed = 0;
    std::size_t n_train_swd = 106;
    std::size_t n_train_bg = 106;
    std::size_t n_test = 69;
    TrainOptions train;
    DatasetSpec dataset;
    PipelineConfig pipeline;
    unsigned threads = 0;
};

/// Synthetic train/test sets (test roughly half SWD), featurize, train, evaluate.
EvalReport run_end_to_end(const EndToEndOptions& opts);

}  // namespace swd
