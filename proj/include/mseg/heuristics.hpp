#pragma once

#include "mseg/telemetry.hpp"

namespace mseg {

struct HeuristicConfig {
    double stop_speed_eps = 0.3;   // m/s; "speed ~= 0" tolerance
    double k_sigma = 2.0;          // lane-keeping band half-width in sigmas
    double min_stop_fraction = 0.8;

    void validate() const;
};

// Mean and population standard deviation of the (smoothed) gyro channel.
std::pair<double, double> trip_gyro_stats(const TelemetryTrip& trip);

// Verdict for a non-event span: Stop if the span is mostly at standstill,
// else LaneKeeping if the gyro stays inside the mu +/- k*sigma band, else
// Anomaly.
ManeuverLabel classify_non_event(const TelemetryTrip& trip, const Segment& seg,
                                 double trip_gyro_mean, double trip_gyro_std,
                                 const HeuristicConfig& cfg);

// Pipeline helper: split a non-event gap on standstill runs (speed <=
// stop_speed_eps for at least 1 s) so stop plateaus inside long gaps are
// classified separately, then label each piece.
std::vector<LabeledEvent> classify_gap(const TelemetryTrip& trip, const Segment& gap,
                                       double trip_gyro_mean, double trip_gyro_std,
                                       const HeuristicConfig& cfg);

}  // namespace mseg
