#include "mseg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"
#include "mseg/ensemble.hpp"
#include "mseg/errors.hpp"
#include "mseg/heuristics.hpp"
#include "mseg/preprocess.hpp"

namespace mseg {

PreparedTrip prepare_trip(TelemetryTrip trip, const PipelineConfig& cfg) {
    trip.validate();
    PreparedTrip out;
    out.smoothed = trip;
    auto window = static_cast<std::size_t>(
        std::llround(cfg.smoothing_window_s * trip.sample_rate_hz));
    if (window < 1) window = 1;
    if (window > trip.size()) window = trip.size();
    out.smoothed.gyro_z = moving_average(trip.gyro_z, window);
    auto [normalized, params] = normalize(out.smoothed.gyro_z);
    out.normalized = std::move(normalized);
    out.norm_params = params;
    auto [mean, sd] = trip_gyro_stats(out.smoothed);
    out.gyro_mean = mean;
    out.gyro_std = sd;
    out.trip = std::move(trip);
    return out;
}

std::array<double, kNumEventClasses> AnyModel::predict(const FeatureVector& fv) const {
    if (kind == ModelKind::Cnn) return cnn_forward(cnn, fv);
    return rf_predict(rf.forest, pca_transform(rf.pca, fv));
}

AnyModel load_model(const std::string& path) {
    AnyModel m;
    m.kind = peek_model_kind(path);
    if (m.kind == ModelKind::Cnn) {
        m.cnn = load_cnn(path);
    } else {
        m.rf = load_rf(path);
    }
    return m;
}

FeatureVector event_features(const PreparedTrip& prepared, const Segment& seg) {
    if (seg.end_idx > prepared.normalized.size() || seg.start_idx >= seg.end_idx) {
        throw OutOfBounds("event_features: segment out of bounds");
    }
    std::vector<double> window(prepared.normalized.begin() + static_cast<std::ptrdiff_t>(seg.start_idx),
                               prepared.normalized.begin() + static_cast<std::ptrdiff_t>(seg.end_idx));
    FeatureVector fv = resample_to_fixed(window);
    fv.source_segment = seg;
    return fv;
}

std::vector<Segment> segment_trip(const PreparedTrip& prepared, const PipelineConfig& cfg) {
    std::vector<Segment> events =
        detect_events(prepared.normalized, cfg.ema, prepared.trip.sample_rate_hz);
    // The moving average spreads an event's support by half the smoothing
    // window on each side ([i-hl, i+hr] coverage); shrink boundaries back.
    auto window = static_cast<std::size_t>(
        std::llround(cfg.smoothing_window_s * prepared.trip.sample_rate_hz));
    if (window < 1) window = 1;
    const std::size_t half_left = (window - 1) / 2;
    const std::size_t half_right = window / 2;
    std::vector<Segment> out;
    for (Segment e : events) {
        e.start_idx += half_right;
        if (e.end_idx > half_left) e.end_idx -= half_left;
        if (e.start_idx < e.end_idx) out.push_back(e);
    }
    return out;
}

namespace {

// Split a fixed-window tiling into event/non-event windows with the same
// relative energy threshold the EMA uses.
void split_fixed_windows(const PreparedTrip& prepared, const PipelineConfig& cfg,
                         double fixed_window_s, std::vector<Segment>& events,
                         std::vector<Segment>& non_events) {
    const double rate = prepared.trip.sample_rate_hz;
    std::vector<Segment> windows =
        fixed_window_segments(prepared.normalized.size(), fixed_window_s, rate);
    std::vector<double> energies;
    for (Segment& w : windows) {
        w.peak_energy = window_energy(prepared.normalized, w.start_idx + w.length() / 2,
                                      w.length(), rate);
        energies.push_back(w.peak_energy);
    }
    std::vector<double> sorted = energies;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
    double threshold = cfg.ema.event_energy_threshold * median;
    for (const Segment& w : windows) {
        if (w.peak_energy >= threshold && w.peak_energy > 0.0) {
            events.push_back(w);
        } else {
            non_events.push_back(w);
        }
    }
}

}  // namespace

std::vector<LabeledEvent> classify_trip(const PreparedTrip& prepared, const PipelineConfig& cfg,
                                        const std::vector<AnyModel>& models,
                                        double fixed_window_s) {
    if (models.empty()) throw EmptyInput("classify_trip: no models given");

    std::vector<Segment> events;
    std::vector<Segment> non_events;
    if (fixed_window_s > 0.0) {
        split_fixed_windows(prepared, cfg, fixed_window_s, events, non_events);
    } else {
        events = segment_trip(prepared, cfg);
        non_events = non_event_spans(prepared.normalized.size(), events);
    }

    std::vector<LabeledEvent> out;
    for (const Segment& seg : events) {
        FeatureVector fv = event_features(prepared, seg);
        std::vector<Prediction> preds;
        for (const AnyModel& model : models) {
            auto probs = model.predict(fv);
            auto arg = static_cast<std::size_t>(
                std::max_element(probs.begin(), probs.end()) - probs.begin());
            preds.push_back(Prediction{static_cast<ManeuverLabel>(arg), probs[arg]});
        }
        LabeledEvent ev;
        ev.segment = seg;
        if (preds.size() == 1) {
            ev.label = preds[0].label;
            ev.confidence = preds[0].confidence;
        } else {
            ev.label = ensemble_vote(preds);
            double conf = 0.0;
            std::size_t votes = 0;
            for (const Prediction& p : preds) {
                if (p.label == ev.label) {
                    conf += p.confidence;
                    ++votes;
                }
            }
            ev.confidence = votes ? conf / static_cast<double>(votes) : 0.0;
        }
        out.push_back(ev);
    }
    for (const Segment& gap : non_events) {
        auto pieces = classify_gap(prepared.smoothed, gap, prepared.gyro_mean, prepared.gyro_std,
                                   cfg.heuristics);
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    std::sort(out.begin(), out.end(), [](const LabeledEvent& a, const LabeledEvent& b) {
        return a.segment.start_idx < b.segment.start_idx;
    });
    return out;
}

TrainingSet build_training_set(const Corpus& corpus, const PipelineConfig& cfg) {
    TrainingSet set;
    for (const auto& [trip, truth] : corpus) {
        PreparedTrip prepared = prepare_trip(trip, cfg);
        for (const LabeledEvent& ev : truth.events) {
            if (!is_event_class(ev.label)) continue;
            set.emplace_back(event_features(prepared, ev.segment), static_cast<int>(ev.label));
        }
    }
    return set;
}

void write_events_jsonl(const std::vector<std::pair<std::string, std::vector<LabeledEvent>>>& trips,
                        const std::string& path, const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    if (!config_hash.empty()) out << "{\"config_hash\":\"" << config_hash << "\"}\n";
    char buf[64];
    for (const auto& [trip_id, events] : trips) {
        for (const LabeledEvent& ev : events) {
            std::snprintf(buf, sizeof(buf), "%.17g", ev.confidence);
            out << "{\"trip_id\":\"" << trip_id << "\",\"start_idx\":" << ev.segment.start_idx
                << ",\"end_idx\":" << ev.segment.end_idx << ",\"label\":\"" << to_string(ev.label)
                << "\",\"confidence\":" << buf << "}\n";
        }
    }
    if (!out) throw IoFailure("failed writing " + path);
}

std::vector<std::pair<std::string, std::vector<LabeledEvent>>> read_events_jsonl(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::map<std::string, std::vector<LabeledEvent>> by_trip;
    std::vector<std::string> order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line);
        if (obj.contains("config_hash")) continue;
        LabeledEvent ev;
        ev.segment.start_idx = obj.at("start_idx").get<std::size_t>();
        ev.segment.end_idx = obj.at("end_idx").get<std::size_t>();
        ev.label = label_from_string(obj.at("label").get<std::string>());
        ev.confidence = obj.value("confidence", 1.0);
        std::string trip_id = obj.at("trip_id").get<std::string>();
        if (!by_trip.count(trip_id)) order.push_back(trip_id);
        by_trip[trip_id].push_back(ev);
    }
    std::vector<std::pair<std::string, std::vector<LabeledEvent>>> out;
    for (const std::string& trip_id : order) out.emplace_back(trip_id, by_trip[trip_id]);
    return out;
}

}  // namespace mseg
