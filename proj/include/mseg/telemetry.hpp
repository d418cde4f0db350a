#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mseg/label.hpp"

namespace mseg {

// Half-open sample-index interval produced by segmentation.
struct Segment {
    std::size_t start_idx = 0;
    std::size_t end_idx = 0;  // exclusive
    double peak_energy = 0.0;

    std::size_t length() const { return end_idx - start_idx; }
    double duration_s(double sample_rate_hz) const {
        return static_cast<double>(length()) / sample_rate_hz;
    }
};

struct LabeledEvent {
    Segment segment;
    ManeuverLabel label = ManeuverLabel::LaneKeeping;
    double confidence = 1.0;
};

// Continuous two-channel telemetry trip at a fixed sample rate.
// Immutable after construction; safe to share across workers.
struct TelemetryTrip {
    std::string trip_id;
    double sample_rate_hz = 0.0;
    std::vector<double> gyro_z;  // rad/s
    std::vector<double> speed;   // m/s, same length as gyro_z
    double start_epoch_s = 0.0;

    std::size_t size() const { return gyro_z.size(); }
    double duration_s() const {
        return static_cast<double>(size()) / sample_rate_hz;
    }

    // Throws on any invariant violation (length mismatch, empty, non-finite
    // values, non-positive rate).
    void validate() const;
};

// Parse a `t_s,gyro_z,speed` CSV. Sample rate is inferred from the median
// timestamp spacing; jittered timestamps (within 1% of uniform) are
// resampled onto the uniform grid by linear interpolation.
TelemetryTrip read_trip_csv(const std::string& path);

void write_trip_csv(const TelemetryTrip& trip, const std::string& path,
                    const std::string& config_hash = "");

// JSONL alternative: one {"t_s","gyro_z","speed"} object per line.
TelemetryTrip read_trip_jsonl(const std::string& path);

// Sub-trip covering [seg.start_idx, seg.end_idx); same sample rate.
TelemetryTrip slice(const TelemetryTrip& trip, const Segment& seg);

// Interval IoU of two half-open segments.
double segment_iou(const Segment& a, const Segment& b);

}  // namespace mseg
