#pragma once

#include <string>
#include <vector>

#include "mseg/telemetry.hpp"

namespace mseg {

// Per-video-frame maneuver labels; frame j covers [j/fps, (j+1)/fps).
struct FrameTrack {
    std::string trip_id;
    double fps = 0.0;
    std::vector<ManeuverLabel> labels;  // one per frame
};

// Map classified events onto the frame grid. A frame takes the label of the
// event whose time interval contains the frame start; uncovered frames
// default to LaneKeeping.
FrameTrack to_frame_track(const TelemetryTrip& trip, const std::vector<LabeledEvent>& events,
                          double fps);

// CSV `frame_idx,label` with canonical snake_case label strings.
void write_track_csv(const FrameTrack& track, const std::string& path,
                     const std::string& config_hash = "");
FrameTrack read_track_csv(const std::string& path);

// Optional run-length encoding: {"start_frame","end_frame","label"} JSONL.
void write_track_rle_jsonl(const FrameTrack& track, const std::string& path,
                           const std::string& config_hash = "");

}  // namespace mseg
