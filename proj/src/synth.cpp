#include "mseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "json.hpp"
#include "mseg/errors.hpp"
#include "mseg/rng.hpp"

namespace mseg {

namespace {

constexpr double kPi = 3.141592653589793;

const EventTemplate* template_for(ManeuverLabel label) {
    for (const EventTemplate& t : default_templates()) {
        if (t.label == label) return &t;
    }
    return nullptr;
}

double pulse_value(PulseShape shape, double phase /* in (0,1) */) {
    switch (shape) {
        case PulseShape::HalfSine:
            return std::sin(kPi * phase);
        case PulseShape::FlatHalfSine:
            // Flattened top, steeper shoulders than a plain half sine.
            return std::sqrt(std::sin(kPi * phase));
        case PulseShape::SShape:
            // Asymmetric S: the initial steering input is stronger than the
            // counter-steer, as in real lane changes. (A perfectly
            // antisymmetric S has a sign-closed set of local patterns, which
            // no position-invariant classifier can tell from its mirror.)
            return std::sin(2.0 * kPi * phase) * (phase < 0.5 ? 1.0 : 0.6);
    }
    return 0.0;
}

struct PlacementItem {
    ManeuverLabel label;
    std::size_t dur;         // samples
    std::size_t min_gap_after;  // samples, before the next item
    double amplitude;        // signed, normalized units (0 for Stop)
    PulseShape shape = PulseShape::HalfSine;
};

}  // namespace

const std::vector<EventTemplate>& default_templates() {
    static const std::vector<EventTemplate> templates = {
        {ManeuverLabel::RightTurn, 4.0, 6.0, 0.6, 0.8, PulseShape::HalfSine, +1.0},
        {ManeuverLabel::LeftTurn, 4.0, 6.0, 0.6, 0.8, PulseShape::HalfSine, -1.0},
        {ManeuverLabel::RightCurve, 4.0, 10.0, 0.4, 0.5, PulseShape::FlatHalfSine, +1.0},
        {ManeuverLabel::LeftCurve, 4.0, 10.0, 0.4, 0.5, PulseShape::FlatHalfSine, -1.0},
        {ManeuverLabel::RightLaneChange, 3.0, 7.0, 0.25, 0.3, PulseShape::SShape, +1.0},
        {ManeuverLabel::LeftLaneChange, 3.0, 7.0, 0.25, 0.3, PulseShape::SShape, -1.0},
    };
    return templates;
}

std::pair<TelemetryTrip, GroundTruth> generate_trip(const SynthConfig& cfg) {
    Rng rng(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    std::vector<ManeuverLabel> labels;
    for (std::size_t i = 0; i < cfg.events_per_trip; ++i) {
        labels.push_back(static_cast<ManeuverLabel>(rng.uniform_index(kNumEventClasses)));
    }
    return generate_trip(cfg, std::move(labels));
}

std::pair<TelemetryTrip, GroundTruth> generate_trip(const SynthConfig& cfg,
                                                    std::vector<ManeuverLabel> event_labels) {
    const double rate = cfg.sample_rate_hz;
    const auto n = static_cast<std::size_t>(std::llround(cfg.trip_len_s * rate));
    const auto gap_min = static_cast<std::size_t>(std::llround(cfg.inter_event_gap_min_s * rate));
    Rng rng(cfg.seed);

    rng.shuffle(event_labels);

    std::vector<PlacementItem> items;
    for (std::size_t i = 0; i < event_labels.size(); ++i) {
        const EventTemplate* tpl = template_for(event_labels[i]);
        if (!tpl) throw ConfigError("generate_trip: label is not a maneuver event class");
        PlacementItem item;
        item.label = tpl->label;
        double dur_s = rng.uniform(tpl->duration_lo_s, tpl->duration_hi_s);
        item.dur = static_cast<std::size_t>(std::llround(dur_s * rate));
        item.amplitude = tpl->sign * rng.uniform(tpl->amplitude_lo, tpl->amplitude_hi);
        item.shape = tpl->shape;
        item.min_gap_after = gap_min;
        if (cfg.adversarial_curve_turn && i == 0) {
            // Known EMA failure mode: a curve negotiated straight into a turn.
            item.min_gap_after = static_cast<std::size_t>(std::llround(0.3 * rate));
            const EventTemplate* turn = template_for(
                tpl->sign > 0 ? ManeuverLabel::RightTurn : ManeuverLabel::LeftTurn);
            PlacementItem follow;
            follow.label = turn->label;
            follow.dur = static_cast<std::size_t>(
                std::llround(rng.uniform(turn->duration_lo_s, turn->duration_hi_s) * rate));
            follow.amplitude = turn->sign * rng.uniform(turn->amplitude_lo, turn->amplitude_hi);
            follow.shape = turn->shape;
            follow.min_gap_after = gap_min;
            items.push_back(item);
            items.push_back(follow);
            continue;
        }
        items.push_back(item);
    }

    if (rng.uniform() < cfg.stop_probability) {
        PlacementItem stop;
        stop.label = ManeuverLabel::Stop;
        stop.dur = static_cast<std::size_t>(std::llround(rng.uniform(3.0, 8.0) * rate));
        stop.amplitude = 0.0;
        stop.min_gap_after = gap_min;
        items.insert(items.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(items.size() + 1)),
                     stop);
    }

    std::size_t required = gap_min;  // leading gap
    for (const PlacementItem& item : items) required += item.dur + item.min_gap_after;
    if (required > n) {
        throw TripTooShort("generate_trip: trip_len_s too short for requested events");
    }

    // Spread the slack over the inter-event gaps with random weights.
    std::size_t slack = n - required;
    std::vector<double> weights(items.size() + 1);
    double wsum = 0.0;
    for (double& w : weights) {
        w = rng.uniform();
        wsum += w;
    }
    std::vector<std::size_t> extra(weights.size(), 0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        extra[i] = static_cast<std::size_t>(static_cast<double>(slack) * weights[i] / wsum);
        assigned += extra[i];
    }
    extra.back() += slack - assigned;

    TelemetryTrip trip;
    trip.trip_id = cfg.trip_id;
    trip.sample_rate_hz = rate;
    trip.gyro_z.assign(n, 0.0);
    trip.speed.assign(n, cfg.cruise_speed_mps);

    GroundTruth truth;
    std::size_t cursor = gap_min + extra[0];
    const auto ramp = static_cast<std::size_t>(std::llround(1.5 * rate));
    for (std::size_t i = 0; i < items.size(); ++i) {
        const PlacementItem& item = items[i];
        std::size_t start = cursor;
        std::size_t end = start + item.dur;
        if (item.label == ManeuverLabel::Stop) {
            for (std::size_t k = start; k < end; ++k) trip.speed[k] = 0.0;
            // Deceleration / acceleration ramps sit outside the truth interval.
            for (std::size_t k = 0; k < ramp && k < start; ++k) {
                double f = static_cast<double>(k + 1) / static_cast<double>(ramp + 1);
                trip.speed[start - 1 - k] = cfg.cruise_speed_mps * f;
            }
            for (std::size_t k = 0; k < ramp && end + k < n; ++k) {
                double f = static_cast<double>(k + 1) / static_cast<double>(ramp + 1);
                trip.speed[end + k] = cfg.cruise_speed_mps * f;
            }
        } else {
            // Half-sample phase offset keeps every in-event sample nonzero.
            for (std::size_t k = start; k < end; ++k) {
                double phase = (static_cast<double>(k - start) + 0.5) / static_cast<double>(item.dur);
                trip.gyro_z[k] += item.amplitude * pulse_value(item.shape, phase);
            }
        }
        truth.events.push_back(LabeledEvent{Segment{start, end, 0.0}, item.label, 1.0});
        cursor = end + item.min_gap_after + extra[i + 1];
    }

    if (rng.uniform() < cfg.anomaly_probability) {
        // 0.2 s high-amplitude burst in the middle of the widest gap.
        std::size_t best_lo = 0, best_len = 0, prev_end = 0;
        for (const LabeledEvent& ev : truth.events) {
            if (ev.segment.start_idx - prev_end > best_len) {
                best_len = ev.segment.start_idx - prev_end;
                best_lo = prev_end;
            }
            prev_end = ev.segment.end_idx;
        }
        if (n - prev_end > best_len) {
            best_len = n - prev_end;
            best_lo = prev_end;
        }
        auto dur = static_cast<std::size_t>(std::llround(0.2 * rate));
        if (best_len > dur + 2) {
            std::size_t start = best_lo + (best_len - dur) / 2;
            double amp = (rng.uniform() < 0.5 ? -1.0 : 1.0) * 2.0;
            for (std::size_t k = start; k < start + dur; ++k) trip.gyro_z[k] += amp;
            truth.events.push_back(
                LabeledEvent{Segment{start, start + dur, 0.0}, ManeuverLabel::Anomaly, 1.0});
        }
    }

    if (cfg.noise_sigma > 0.0) {
        for (double& v : trip.gyro_z) v += rng.normal(0.0, cfg.noise_sigma);
    }

    std::sort(truth.events.begin(), truth.events.end(),
              [](const LabeledEvent& a, const LabeledEvent& b) {
                  return a.segment.start_idx < b.segment.start_idx;
              });
    return {std::move(trip), std::move(truth)};
}

Corpus generate_corpus(const SynthConfig& cfg, std::size_t n_trips) {
    if (n_trips < 1) throw ConfigError("generate_corpus: n_trips must be >= 1");
    Rng master(cfg.seed);

    // Balanced deck of maneuver classes for the whole corpus.
    std::size_t total = n_trips * cfg.events_per_trip;
    std::vector<ManeuverLabel> deck;
    deck.reserve(total + kNumEventClasses);
    while (deck.size() < total) {
        for (int c = 0; c < kNumEventClasses; ++c) {
            deck.push_back(static_cast<ManeuverLabel>(c));
        }
    }
    deck.resize(total);
    master.shuffle(deck);

    Corpus corpus;
    char id[32];
    for (std::size_t t = 0; t < n_trips; ++t) {
        SynthConfig trip_cfg = cfg;
        std::snprintf(id, sizeof(id), "trip_%04zu", t);
        trip_cfg.trip_id = id;
        trip_cfg.seed = master.fork_seed();
        std::vector<ManeuverLabel> labels(
            deck.begin() + static_cast<std::ptrdiff_t>(t * cfg.events_per_trip),
            deck.begin() + static_cast<std::ptrdiff_t>((t + 1) * cfg.events_per_trip));
        corpus.push_back(generate_trip(trip_cfg, std::move(labels)));
    }
    return corpus;
}

void export_corpus(const Corpus& corpus, const std::string& dir,
                   const std::string& config_hash) {
    std::filesystem::create_directories(dir);
    std::ofstream truth(dir + "/truth.jsonl", std::ios::binary);
    if (!truth) throw IoFailure("cannot write " + dir + "/truth.jsonl");
    if (!config_hash.empty()) truth << "{\"config_hash\":\"" << config_hash << "\"}\n";
    for (const auto& [trip, gt] : corpus) {
        write_trip_csv(trip, dir + "/" + trip.trip_id + ".csv", config_hash);
        for (const LabeledEvent& ev : gt.events) {
            truth << "{\"trip_id\":\"" << trip.trip_id << "\",\"start_idx\":" << ev.segment.start_idx
                  << ",\"end_idx\":" << ev.segment.end_idx << ",\"label\":\""
                  << to_string(ev.label) << "\"}\n";
        }
    }
    if (!truth) throw IoFailure("failed writing " + dir + "/truth.jsonl");
}

Corpus load_corpus(const std::string& dir) {
    std::ifstream truth(dir + "/truth.jsonl");
    if (!truth) throw IoFailure("cannot open " + dir + "/truth.jsonl");
    std::map<std::string, GroundTruth> by_trip;
    std::string line;
    while (std::getline(truth, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line);
        if (obj.contains("config_hash")) continue;
        LabeledEvent ev;
        ev.segment.start_idx = obj.at("start_idx").get<std::size_t>();
        ev.segment.end_idx = obj.at("end_idx").get<std::size_t>();
        ev.label = label_from_string(obj.at("label").get<std::string>());
        by_trip[obj.at("trip_id").get<std::string>()].events.push_back(ev);
    }
    Corpus corpus;
    for (auto& [trip_id, gt] : by_trip) {
        TelemetryTrip trip = read_trip_csv(dir + "/" + trip_id + ".csv");
        trip.trip_id = trip_id;
        std::sort(gt.events.begin(), gt.events.end(),
                  [](const LabeledEvent& a, const LabeledEvent& b) {
                      return a.segment.start_idx < b.segment.start_idx;
                  });
        corpus.emplace_back(std::move(trip), std::move(gt));
    }
    return corpus;
}

}  // namespace mseg
