#include "mseg/heuristics.hpp"

#include <cmath>

#include "mseg/errors.hpp"

namespace mseg {

void HeuristicConfig::validate() const {
    if (stop_speed_eps < 0.0) throw ConfigError("HeuristicConfig: stop_speed_eps must be >= 0");
    if (!(k_sigma > 0.0)) throw ConfigError("HeuristicConfig: k_sigma must be > 0");
    if (min_stop_fraction < 0.0 || min_stop_fraction > 1.0) {
        throw ConfigError("HeuristicConfig: min_stop_fraction must be in [0,1]");
    }
}

std::pair<double, double> trip_gyro_stats(const TelemetryTrip& trip) {
    if (trip.size() == 0) throw EmptyTrip("trip_gyro_stats: empty trip");
    double sum = 0.0;
    for (double v : trip.gyro_z) sum += v;
    double mean = sum / static_cast<double>(trip.size());
    double ss = 0.0;
    for (double v : trip.gyro_z) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(trip.size()))};
}

ManeuverLabel classify_non_event(const TelemetryTrip& trip, const Segment& seg,
                                 double trip_gyro_mean, double trip_gyro_std,
                                 const HeuristicConfig& cfg) {
    cfg.validate();
    if (seg.start_idx >= seg.end_idx || seg.end_idx > trip.size()) {
        throw OutOfBounds("classify_non_event: segment out of bounds");
    }
    const double n = static_cast<double>(seg.length());
    std::size_t stopped = 0, in_band = 0;
    const double band = cfg.k_sigma * trip_gyro_std;
    for (std::size_t i = seg.start_idx; i < seg.end_idx; ++i) {
        if (trip.speed[i] <= cfg.stop_speed_eps) ++stopped;
        if (std::abs(trip.gyro_z[i] - trip_gyro_mean) <= band) ++in_band;
    }
    // Speed test first: a parked vehicle is Stop regardless of the band.
    if (static_cast<double>(stopped) / n > cfg.min_stop_fraction) return ManeuverLabel::Stop;
    if (static_cast<double>(in_band) / n >= cfg.min_stop_fraction) return ManeuverLabel::LaneKeeping;
    return ManeuverLabel::Anomaly;
}

std::vector<LabeledEvent> classify_gap(const TelemetryTrip& trip, const Segment& gap,
                                       double trip_gyro_mean, double trip_gyro_std,
                                       const HeuristicConfig& cfg) {
    const auto min_run = static_cast<std::size_t>(std::llround(trip.sample_rate_hz));
    std::vector<Segment> pieces;
    std::size_t cursor = gap.start_idx;
    std::size_t i = gap.start_idx;
    while (i < gap.end_idx) {
        if (trip.speed[i] <= cfg.stop_speed_eps) {
            std::size_t run_end = i;
            while (run_end < gap.end_idx && trip.speed[run_end] <= cfg.stop_speed_eps) ++run_end;
            if (run_end - i >= min_run) {
                if (i > cursor) pieces.push_back(Segment{cursor, i, 0.0});
                pieces.push_back(Segment{i, run_end, 0.0});
                cursor = run_end;
            }
            i = run_end;
        } else {
            ++i;
        }
    }
    if (cursor < gap.end_idx) pieces.push_back(Segment{cursor, gap.end_idx, 0.0});

    std::vector<LabeledEvent> out;
    for (const Segment& piece : pieces) {
        LabeledEvent ev;
        ev.segment = piece;
        ev.label = classify_non_event(trip, piece, trip_gyro_mean, trip_gyro_std, cfg);
        ev.confidence = 1.0;
        out.push_back(ev);
    }
    return out;
}

}  // namespace mseg
