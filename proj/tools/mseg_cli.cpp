// Command-line front end for the maneuver-detection pipeline:
// synth / segment / train / classify / evaluate / annotate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mseg/annotate.hpp"
#include "mseg/errors.hpp"
#include "mseg/metrics.hpp"
#include "mseg/pipeline.hpp"

namespace {

using namespace mseg;

// Shared --config / --seed handling; CLI flags override file values.
struct ConfigArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Pipeline TOML config file");
        cmd->add_option("--seed", seed, "Master seed (overrides config)")
            ->each([this](const std::string&) { seed_set = true; });
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (seed_set) {
            cfg.seed = seed;
            cfg.synth.seed = seed;
        }
        cfg.validate();
        return cfg;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    out << text;
    if (!out) throw IoFailure("failed writing " + path);
}

int cmd_synth(const ConfigArgs& args, std::size_t n_trips, const std::string& out_dir) {
    PipelineConfig cfg = args.resolve();
    Corpus corpus = generate_corpus(cfg.synth, n_trips);
    export_corpus(corpus, out_dir, config_hash(cfg));
    std::size_t events = 0;
    for (const auto& [trip, truth] : corpus) events += truth.events.size();
    std::printf("wrote %zu trips (%zu ground-truth events) to %s\n", corpus.size(), events,
                out_dir.c_str());
    return 0;
}

int cmd_segment(const ConfigArgs& args, const std::string& input, const std::string& output,
                double fixed_window_s) {
    PipelineConfig cfg = args.resolve();
    PreparedTrip prepared = prepare_trip(read_trip_csv(input), cfg);
    std::vector<Segment> segments;
    if (fixed_window_s > 0.0) {
        segments = fixed_window_segments(prepared.normalized.size(), fixed_window_s,
                                         prepared.trip.sample_rate_hz);
    } else {
        segments = segment_trip(prepared, cfg);
    }
    write_segments_jsonl(segments, output, config_hash(cfg));
    std::printf("wrote %zu segments to %s\n", segments.size(), output.c_str());
    return 0;
}

int cmd_train(const ConfigArgs& args, const std::string& corpus_dir, const std::string& kind,
              const std::string& out_model, const std::string& report_path) {
    PipelineConfig cfg = args.resolve();
    Corpus corpus = load_corpus(corpus_dir);
    TrainingSet dataset = build_training_set(corpus, cfg);
    if (dataset.empty()) throw EmptyDataset("no maneuver events in corpus " + corpus_dir);

    nlohmann::ordered_json report;
    report["config_hash"] = config_hash(cfg);
    report["model_kind"] = kind;
    report["training_examples"] = dataset.size();
    report["seed"] = cfg.seed;

    if (kind == "cnn") {
        auto [model, train_report] = cnn_train(dataset, cfg.seed);
        model_save(model, out_model);
        report["epoch_loss"] = train_report.epoch_loss;
        report["final_train_accuracy"] = train_report.final_train_accuracy;
    } else if (kind == "rf") {
        PcaModel pca = pca_fit(
            [&] {
                std::vector<FeatureVector> vecs;
                for (const auto& [fv, cls] : dataset) vecs.push_back(fv);
                return vecs;
            }(),
            cfg.pca_components);
        ForestSet projected;
        for (const auto& [fv, cls] : dataset) projected.emplace_back(pca_transform(pca, fv), cls);
        std::size_t subset = cfg.rf_subset_size;
        if (subset == 0) {
            subset = static_cast<std::size_t>(
                std::ceil(std::sqrt(static_cast<double>(cfg.pca_components))));
        }
        RfBundle bundle{std::move(pca), rf_train(projected, cfg.rf_trees, subset, cfg.seed)};
        model_save(bundle, out_model);
        std::size_t correct = 0;
        for (const auto& [rec, cls] : projected) {
            auto probs = rf_predict(bundle.forest, rec);
            if (std::max_element(probs.begin(), probs.end()) - probs.begin() == cls) ++correct;
        }
        report["final_train_accuracy"] =
            static_cast<double>(correct) / static_cast<double>(projected.size());
    } else {
        throw ConfigError("unknown model kind '" + kind + "' (expected cnn or rf)");
    }
    if (!report_path.empty()) write_text(report_path, report.dump(2) + "\n");
    std::printf("trained %s model on %zu events -> %s\n", kind.c_str(), dataset.size(),
                out_model.c_str());
    return 0;
}

int cmd_classify(const ConfigArgs& args, const std::string& input,
                 const std::vector<std::string>& model_paths, const std::string& output,
                 double fixed_window_s) {
    PipelineConfig cfg = args.resolve();
    std::vector<AnyModel> models;
    for (const std::string& p : model_paths) models.push_back(load_model(p));
    TelemetryTrip trip = read_trip_csv(input);
    PreparedTrip prepared = prepare_trip(trip, cfg);
    std::vector<LabeledEvent> events = classify_trip(prepared, cfg, models, fixed_window_s);
    write_events_jsonl({{trip.trip_id, events}}, output, config_hash(cfg));
    std::printf("wrote %zu labeled spans to %s\n", events.size(), output.c_str());
    return 0;
}

std::vector<LabeledEvent> truth_events_for(const std::string& truth_path,
                                           const std::string& trip_id) {
    std::ifstream in(truth_path);
    if (!in) throw IoFailure("cannot open " + truth_path);
    std::vector<LabeledEvent> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line);
        if (obj.contains("config_hash")) continue;
        if (obj.at("trip_id").get<std::string>() != trip_id) continue;
        LabeledEvent ev;
        ev.segment.start_idx = obj.at("start_idx").get<std::size_t>();
        ev.segment.end_idx = obj.at("end_idx").get<std::size_t>();
        ev.label = label_from_string(obj.at("label").get<std::string>());
        out.push_back(ev);
    }
    return out;
}

int cmd_evaluate(const ConfigArgs& args, const std::string& events_path,
                 const std::string& truth_path, double sample_rate_hz,
                 const std::string& report_path, const std::string& confusion_path) {
    PipelineConfig cfg = args.resolve();
    auto predicted = read_events_jsonl(events_path);
    std::vector<std::pair<std::vector<LabeledEvent>, std::vector<LabeledEvent>>> pairs;
    for (const auto& [trip_id, events] : predicted) {
        pairs.emplace_back(truth_events_for(truth_path, trip_id), events);
    }
    EvaluationReport report =
        evaluate_corpus(pairs, sample_rate_hz, cfg.match_iou_min, cfg.duration_clamp_s);
    std::fputs(report_to_table(report).c_str(), stdout);
    if (!report_path.empty()) {
        write_text(report_path, report_to_json(report, config_hash(cfg)));
    }
    if (!confusion_path.empty()) write_text(confusion_path, confusion_to_csv(report.counts));
    return 0;
}

int cmd_annotate(const ConfigArgs& args, const std::string& trip_path,
                 const std::string& events_path, double fps, const std::string& output) {
    PipelineConfig cfg = args.resolve();
    TelemetryTrip trip = read_trip_csv(trip_path);
    auto by_trip = read_events_jsonl(events_path);
    std::vector<LabeledEvent> events;
    for (const auto& [trip_id, evs] : by_trip) {
        if (trip_id == trip.trip_id || by_trip.size() == 1) events = evs;
    }
    FrameTrack track = to_frame_track(trip, events, fps);
    write_track_csv(track, output, config_hash(cfg));
    std::printf("wrote %zu frame labels to %s\n", track.labels.size(), output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driving-maneuver detection pipeline: segmentation, classification, evaluation"};
    app.require_subcommand(1);

    ConfigArgs synth_args, seg_args, train_args, cls_args, eval_args, ann_args;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic trip corpus with ground truth");
    std::size_t n_trips = 10;
    std::string out_dir;
    synth->add_option("--trips", n_trips, "Number of trips to generate")->capture_default_str();
    synth->add_option("--out", out_dir, "Output corpus directory")->required();
    synth_args.attach(synth);

    auto* segment = app.add_subcommand("segment", "Segment a trip CSV into candidate events");
    std::string seg_input, seg_output;
    double seg_fixed = 0.0;
    segment->add_option("--input", seg_input, "Trip CSV")->required();
    segment->add_option("--output", seg_output, "Output segments JSONL")->required();
    segment->add_option("--fixed-window", seg_fixed,
                        "Use a fixed window of this many seconds instead of the EMA");
    seg_args.attach(segment);

    auto* train = app.add_subcommand("train", "Train a classifier on a corpus directory");
    std::string corpus_dir, model_kind, out_model, train_report;
    train->add_option("--corpus", corpus_dir, "Corpus directory (trip CSVs + truth.jsonl)")
        ->required();
    train->add_option("--kind", model_kind, "Model kind: cnn or rf")->required();
    train->add_option("--out", out_model, "Output model file")->required();
    train->add_option("--report", train_report, "Training report JSON path");
    train_args.attach(train);

    auto* classify = app.add_subcommand("classify", "Segment and classify a trip end to end");
    std::string cls_input, cls_output;
    std::vector<std::string> cls_models;
    double cls_fixed = 0.0;
    classify->add_option("--input", cls_input, "Trip CSV")->required();
    classify->add_option("--model", cls_models, "Model file (repeat for an ensemble vote)")
        ->required();
    classify->add_option("--output", cls_output, "Output events JSONL")->required();
    classify->add_option("--fixed-window", cls_fixed,
                         "Fixed-window segmentation baseline (seconds)");
    cls_args.attach(classify);

    auto* evaluate = app.add_subcommand("evaluate", "Score predicted events against ground truth");
    std::string ev_events, ev_truth, ev_report, ev_confusion;
    double ev_rate = 30.0;
    evaluate->add_option("--events", ev_events, "Predicted events JSONL")->required();
    evaluate->add_option("--truth", ev_truth, "Ground-truth JSONL")->required();
    evaluate->add_option("--sample-rate", ev_rate, "Sample rate (Hz) for durations")
        ->capture_default_str();
    evaluate->add_option("--report", ev_report, "Report JSON path");
    evaluate->add_option("--confusion", ev_confusion, "Confusion-count CSV path");
    eval_args.attach(evaluate);

    auto* annotate = app.add_subcommand("annotate", "Emit a frame-by-frame label track");
    std::string ann_trip, ann_events, ann_out;
    double fps = 10.0;
    annotate->add_option("--input", ann_trip, "Trip CSV")->required();
    annotate->add_option("--events", ann_events, "Labeled events JSONL")->required();
    annotate->add_option("--fps", fps, "Video frame rate")->capture_default_str();
    annotate->add_option("--output", ann_out, "Output frame-track CSV")->required();
    ann_args.attach(annotate);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(synth_args, n_trips, out_dir);
        if (segment->parsed()) return cmd_segment(seg_args, seg_input, seg_output, seg_fixed);
        if (train->parsed()) {
            return cmd_train(train_args, corpus_dir, model_kind, out_model, train_report);
        }
        if (classify->parsed()) {
            return cmd_classify(cls_args, cls_input, cls_models, cls_output, cls_fixed);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_args, ev_events, ev_truth, ev_rate, ev_report, ev_confusion);
        }
        if (annotate->parsed()) return cmd_annotate(ann_args, ann_trip, ann_events, fps, ann_out);
    } catch (const mseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
