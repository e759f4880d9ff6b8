#include "swd/error.hpp"
#include "swd/harness.hpp"
#include "swd/morlet.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace swd;

namespace {

struct PipelineFlags {
    double window_s = 2.0;
    double overlap_s = 1.0;
    double f_min = 1.0;
    double f_max = 3.0;
    std::size_t n_scales = 21;

    void add_to(CLI::App& app) {
        app.add_option("--window-s", window_s, "window length in seconds")->capture_default_str();
        app.add_option("--overlap-s", overlap_s, "overlap between consecutive windows in seconds")
            ->capture_default_str();
        app.add_option("--f-min", f_min, "lowest pseudo-frequency in Hz")->capture_default_str();
        app.add_option("--f-max", f_max, "highest pseudo-frequency in Hz")->capture_default_str();
        app.add_option("--n-scales", n_scales, "number of wavelet scales")->capture_default_str();
    }

    PipelineConfig config() const {
        PipelineConfig cfg;
        cfg.window = {window_s, overlap_s};
        cfg.f_min_hz = f_min;
        cfg.f_max_hz = f_max;
        cfg.n_scales = n_scales;
        cfg.window.validate();
        if (!(f_min > 0.0) || !(f_min < f_max)) throw swd::Error(ErrorCode::BadBand, "need 0 < f-min < f-max");
        if (n_scales < 1) throw swd::Error(ErrorCode::InvalidArgument, "n-scales must be at least 1");
        return cfg;
    }
};

struct ModelFlags {
    std::size_t k = 10;
    std::string scaling = "zscore";

    void add_to(CLI::App& app) {
        app.add_option("-k", k, "number of neighbors")->capture_default_str();
        app.add_option("--scaling", scaling, "feature scaling before distances")
            ->check(CLI::IsMember({"zscore", "raw"}))
            ->capture_default_str();
    }

    TrainOptions options() const {
        if (k < 1) throw swd::Error(ErrorCode::InvalidArgument, "k must be at least 1");
        return {k, parse_scaling_mode(scaling)};
    }
};

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(path, text);
    }
}

std::vector<FeatureVector> features_of(const std::vector<WindowResult>& windows) {
    std::vector<FeatureVector> out;
    for (const auto& w : windows) {
        if (!w.skipped()) out.push_back(*w.features);
    }
    return out;
}

std::vector<FeatureVector> featurize_files(const fs::path& csv, const fs::path& annotations,
                                           const PipelineConfig& cfg, unsigned threads) {
    const auto rec = load_recording_csv(csv);
    std::vector<Annotation> ann;
    if (!annotations.empty()) ann = load_annotations_json(annotations, rec);
    const auto windows = featurize_recording(rec, annotations.empty() ? nullptr : &ann, cfg, threads);
    spdlog::info("{}: {} windows", csv.string(), windows.size());
    return features_of(windows);
}

std::vector<FeatureVector> load_nonempty_features(const fs::path& path) {
    auto f = load_features_csv(path);
    if (f.empty()) throw swd::Error(ErrorCode::EmptyFile, path.string() + ": no feature rows");
    return f;
}

std::string scatter_svg(const std::vector<FeatureVector>& f, int xi, int yi, const char* xname, const char* yname) {
    const double w = 480, h = 480, pad = 48;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& v : f) {
        const auto p = v.point();
        x0 = std::min(x0, p[xi]);
        x1 = std::max(x1, p[xi]);
        y0 = std::min(y0, p[yi]);
        y1 = std::max(y1, p[yi]);
    }
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect x=\"" << pad << "\" y=\"" << pad / 2 << "\" width=\"" << w - 1.5 * pad << "\" height=\""
       << h - 1.5 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\">" << xname << "</text>\n";
    os << "<text x=\"14\" y=\"" << h / 2 << "\" transform=\"rotate(-90 14 " << h / 2
       << ")\" text-anchor=\"middle\">" << yname << "</text>\n";
    for (const auto& v : f) {
        const auto p = v.point();
        const double px = pad + (p[xi] - x0) / (x1 - x0) * (w - 1.5 * pad);
        const double py = h - pad - (p[yi] - y0) / (y1 - y0) * (h - 1.5 * pad);
        const char* color = !v.label ? "gray" : (*v.label == ClassLabel::Swd ? "red" : "blue");
        os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void set_log_level() {
    auto logger = spdlog::stderr_color_mt("swd");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SWD_LOG_LEVEL")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept it when asked for.
        if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
    }
}

}  // namespace

int main(int argc, char** argv) {
    set_log_level();

    CLI::App app{"Spike-and-wave discharge detection in EEG"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a TOML/INI file; flags override it");
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic labeled dataset");
    fs::path gen_out;
    std::size_t gen_swd = 106, gen_bg = 106;
    std::uint64_t gen_seed = 0;
    double gen_episodes_s = 0.0;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--n-swd", gen_swd, "number of discharge recordings")->capture_default_str();
    gen->add_option("--n-bg", gen_bg, "number of background recordings")->capture_default_str();
    gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
    gen->add_option("--episodes-s", gen_episodes_s,
                    "also write episodes.csv/.json: a background recording of this length with discharges "
                    "(0 = none)")
        ->capture_default_str();

    // featurize
    auto* feat = app.add_subcommand("featurize", "segment, decompose and fit features");
    PipelineFlags feat_p;
    feat_p.add_to(*feat);
    fs::path feat_dataset, feat_rec, feat_ann;
    std::string feat_out;
    auto* feat_ds_opt = feat->add_option("--dataset", feat_dataset, "dataset directory with manifest.json");
    auto* feat_rec_opt = feat->add_option("--recording", feat_rec, "recording CSV");
    feat->add_option("--annotations", feat_ann, "annotation JSON for --recording")->needs(feat_rec_opt);
    feat_ds_opt->excludes(feat_rec_opt);
    feat->add_option("--out", feat_out, "feature CSV (default stdout)");

    // train
    auto* tr = app.add_subcommand("train", "fit a k-NN model on labeled features");
    PipelineFlags tr_p;
    tr_p.add_to(*tr);
    ModelFlags tr_m;
    tr_m.add_to(*tr);
    fs::path tr_features, tr_out;
    tr->add_option("--features", tr_features, "labeled feature CSV")->required();
    tr->add_option("--out", tr_out, "model JSON")->required();

    // augment
    auto* aug = app.add_subcommand("augment", "add a new patient's SWD features to a model");
    fs::path aug_model, aug_features, aug_out;
    aug->add_option("--model", aug_model, "model JSON")->required();
    aug->add_option("--features", aug_features, "feature CSV of at least 10 SWD windows")->required();
    aug->add_option("--out", aug_out, "augmented model JSON")->required();

    // predict
    auto* pred = app.add_subcommand("predict", "classify every window of a recording");
    fs::path pred_model, pred_rec;
    std::string pred_out;
    pred->add_option("--model", pred_model, "model JSON")->required();
    pred->add_option("--recording", pred_rec, "recording CSV")->required();
    pred->add_option("--out", pred_out, "per-window CSV (default stdout)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "score a model on labeled features");
    fs::path ev_model, ev_features;
    std::string ev_out, ev_pred;
    ev->add_option("--model", ev_model, "model JSON")->required();
    ev->add_option("--features", ev_features, "labeled feature CSV")->required();
    ev->add_option("--out", ev_out, "report JSON (default stdout)");
    ev->add_option("--predictions", ev_pred, "per-segment prediction CSV");

    // scatter
    auto* sc = app.add_subcommand("scatter", "pairwise feature scatter data");
    fs::path sc_features, sc_out;
    bool sc_svg = false;
    sc->add_option("--features", sc_features, "feature CSV")->required();
    sc->add_option("--out", sc_out, "output directory")->required();
    sc->add_flag("--svg", sc_svg, "also write SVG plots");

    // end-to-end
    auto* e2e = app.add_subcommand("end-to-end", "synthetic train/test run; exit 0 iff accuracy >= threshold");
    PipelineFlags e2e_p;
    e2e_p.add_to(*e2e);
    ModelFlags e2e_m;
    e2e_m.add_to(*e2e);
    std::uint64_t e2e_seed = 0;
    std::size_t e2e_swd = 106, e2e_bg = 106, e2e_test = 69;
    double e2e_threshold = 0.95;
    bool e2e_segments = false;
    e2e->add_option("--seed", e2e_seed, "random seed")->capture_default_str();
    e2e->add_option("--n-train-swd", e2e_swd, "SWD training recordings")->capture_default_str();
    e2e->add_option("--n-train-bg", e2e_bg, "background training recordings")->capture_default_str();
    e2e->add_option("--n-test", e2e_test, "test recordings")->capture_default_str();
    e2e->add_option("--threshold", e2e_threshold, "minimum accuracy for exit status 0")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    e2e->add_flag("--segments", e2e_segments, "include per-segment predictions in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (auto& c : msg) {
            if (c == '\n') c = ' ';
        }
        std::cerr << "error: InvalidArgument: " << msg << '\n';
        return 2;
    }

    try {
        if (*gen) {
            const auto data = gen_dataset(gen_swd, gen_bg, gen_seed);
            write_dataset(data, gen_out);
            if (gen_episodes_s > 0.0) {
                SynthSpec s;
                s.duration_s = gen_episodes_s;
                s.seed = mix_seed(gen_seed, 0xe915);
                std::vector<Episode> episodes;
                for (double t = 5.0; t + 8.0 <= gen_episodes_s; t += 20.0) episodes.push_back({t, 8.0});
                const auto rec = gen_episode_recording(s, episodes);
                save_recording_csv(rec.recording, gen_out / "episodes.csv");
                save_annotations_json(rec.annotations, gen_out / "episodes.json");
            }
            spdlog::info("wrote {} recordings to {}", data.size(), gen_out.string());
        } else if (*feat) {
            const auto cfg = feat_p.config();
            std::vector<FeatureVector> all;
            if (!feat_dataset.empty()) {
                for (const auto& e : read_manifest(feat_dataset)) {
                    auto f = featurize_files(e.recording_csv, e.annotations_json, cfg, threads);
                    all.insert(all.end(), f.begin(), f.end());
                }
            } else if (!feat_rec.empty()) {
                all = featurize_files(feat_rec, feat_ann, cfg, threads);
            } else {
                throw swd::Error(ErrorCode::InvalidArgument, "featurize needs --dataset or --recording");
            }
            write_output(feat_out, format_features_csv(all));
        } else if (*tr) {
            const auto cfg = tr_p.config();
            const auto opts = tr_m.options();
            const auto model = train(load_nonempty_features(tr_features), opts);
            save_model(model, cfg, tr_out);
        } else if (*aug) {
            const auto loaded = load_model(aug_model);
            const auto extra = load_nonempty_features(aug_features);
            save_model(augment_patient(loaded.model, extra), loaded.pipeline, aug_out);
        } else if (*pred) {
            const auto loaded = load_model(pred_model);
            const auto rec = load_recording_csv(pred_rec);
            write_output(pred_out, format_stream_csv(run_pipeline(rec, loaded.model, loaded.pipeline, threads)));
        } else if (*ev) {
            const auto loaded = load_model(ev_model);
            const auto report = evaluate(loaded.model, load_nonempty_features(ev_features));
            write_output(ev_out, report_to_json(report).dump(2) + "\n");
            if (!ev_pred.empty()) write_text_file(ev_pred, format_predictions_csv(report));
        } else if (*sc) {
            const auto f = load_nonempty_features(sc_features);
            fs::create_directories(sc_out);
            struct Pair {
                const char* file;
                int x, y;
                const char* xname;
                const char* yname;
            };
            const Pair pairs[] = {{"sigma_variance", 0, 1, "sigma", "variance"},
                                  {"sigma_median", 0, 2, "sigma", "median"},
                                  {"variance_median", 1, 2, "variance", "median"}};
            for (const auto& p : pairs) {
                std::string csv = "x,y,class\n";
                for (const auto& v : f) {
                    const auto pt = v.point();
                    csv += format_double(pt[p.x]) + "," + format_double(pt[p.y]) + ",";
                    if (v.label) csv += std::to_string(class_index(*v.label));
                    csv += "\n";
                }
                write_text_file(sc_out / (std::string(p.file) + ".csv"), csv);
                if (sc_svg) {
                    write_text_file(sc_out / (std::string(p.file) + ".svg"), scatter_svg(f, p.x, p.y, p.xname, p.yname));
                }
            }
        } else if (*e2e) {
            EndToEndOptions o;
            o.seed = e2e_seed;
            o.n_train_swd = e2e_swd;
            o.n_train_bg = e2e_bg;
            o.n_test = e2e_test;
            o.train = e2e_m.options();
            o.pipeline = e2e_p.config();
            o.threads = threads;
            const auto report = run_end_to_end(o);
            std::cout << report_to_json(report, e2e_segments).dump(2) << '\n';
            std::cout.flush();
            if (report.accuracy < e2e_threshold) {
                std::cerr << "error: BelowThreshold: accuracy " << report.accuracy << " < " << e2e_threshold << '\n';
                return 1;
            }
        }
    } catch (const swd::Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
