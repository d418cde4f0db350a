#pragma once

#include <string>
#include <vector>

#include "mseg/config.hpp"
#include "mseg/features.hpp"
#include "mseg/preprocess.hpp"
#include "mseg/model_io.hpp"
#include "mseg/synth.hpp"

namespace mseg {

// Preprocessed view of a trip: smoothed gyro for the heuristics, smoothed +
// normalized gyro for segmentation and features.
struct PreparedTrip {
    TelemetryTrip trip;            // original channels
    TelemetryTrip smoothed;        // gyro replaced by its moving average
    std::vector<double> normalized;  // smoothed gyro after mean normalization
    NormalizationParams norm_params;
    double gyro_mean = 0.0;  // stats of the smoothed gyro
    double gyro_std = 0.0;
};

PreparedTrip prepare_trip(TelemetryTrip trip, const PipelineConfig& cfg);

// Loaded classifier of either kind.
struct AnyModel {
    ModelKind kind;
    Cnn1dModel cnn;
    RfBundle rf;

    std::array<double, kNumEventClasses> predict(const FeatureVector& fv) const;
};

AnyModel load_model(const std::string& path);

FeatureVector event_features(const PreparedTrip& prepared, const Segment& seg);

// EMA event segments for the trip.
std::vector<Segment> segment_trip(const PreparedTrip& prepared, const PipelineConfig& cfg);

// Full classification pass: EMA events (or a fixed-window tiling when
// fixed_window_s > 0) through the models, non-event spans through the
// heuristics. Ensemble majority vote when more than one model is given.
std::vector<LabeledEvent> classify_trip(const PreparedTrip& prepared, const PipelineConfig& cfg,
                                        const std::vector<AnyModel>& models,
                                        double fixed_window_s = 0.0);

// Features + class labels for the truth's maneuver events of a corpus.
TrainingSet build_training_set(const Corpus& corpus, const PipelineConfig& cfg);

// events.jsonl: {"trip_id","start_idx","end_idx","label","confidence"}.
void write_events_jsonl(const std::vector<std::pair<std::string, std::vector<LabeledEvent>>>& trips,
                        const std::string& path, const std::string& config_hash = "");
std::vector<std::pair<std::string, std::vector<LabeledEvent>>> read_events_jsonl(
    const std::string& path);

}  // namespace mseg
