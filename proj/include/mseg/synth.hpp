#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mseg/telemetry.hpp"

namespace mseg {

enum class PulseShape : std::uint8_t {
    HalfSine,      // single lobe (turns)
    FlatHalfSine,  // flattened single lobe, longer (curves)
    SShape,        // one positive then one negative lobe (lane changes)
};

struct EventTemplate {
    ManeuverLabel label;
    double duration_lo_s, duration_hi_s;
    double amplitude_lo, amplitude_hi;  // peak |gyro| in normalized units
    PulseShape shape;
    double sign;  // +1 right, -1 left
};

// One template per trainable class; left/right pairs are exact sign mirrors.
const std::vector<EventTemplate>& default_templates();

struct SynthConfig {
    std::string trip_id = "synth";
    double sample_rate_hz = 30.0;
    double trip_len_s = 300.0;
    std::size_t events_per_trip = 8;
    double noise_sigma = 0.0;           // gyro noise, normalized units
    double inter_event_gap_min_s = 4.0;
    double stop_probability = 0.3;      // chance of one stop plateau per trip
    double anomaly_probability = 0.0;   // chance of one 0.2 s spike per trip
    bool adversarial_curve_turn = false;  // curve immediately followed by a turn
    double cruise_speed_mps = 15.0;
    std::uint64_t seed = 1;
};

struct GroundTruth {
    std::vector<LabeledEvent> events;  // non-overlapping, sorted by start
};

std::pair<TelemetryTrip, GroundTruth> generate_trip(const SynthConfig& cfg);

// Same, with the maneuver classes for this trip dealt externally (used by
// generate_corpus for balanced sampling).
std::pair<TelemetryTrip, GroundTruth> generate_trip(const SynthConfig& cfg,
                                                    std::vector<ManeuverLabel> event_labels);

using Corpus = std::vector<std::pair<TelemetryTrip, GroundTruth>>;

// Independent trips with per-trip seeds forked from cfg.seed and the six
// event classes dealt from a balanced shuffled deck.
Corpus generate_corpus(const SynthConfig& cfg, std::size_t n_trips);

// Directory of trip_####.csv files plus truth.jsonl
// ({"trip_id","start_idx","end_idx","label"} per line).
void export_corpus(const Corpus& corpus, const std::string& dir,
                   const std::string& config_hash = "");
Corpus load_corpus(const std::string& dir);

}  // namespace mseg
