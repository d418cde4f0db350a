#include "mseg/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mseg/errors.hpp"

namespace mseg {

FrameTrack to_frame_track(const TelemetryTrip& trip, const std::vector<LabeledEvent>& events,
                          double fps) {
    if (!(fps > 0.0)) throw ConfigError("to_frame_track: fps must be > 0");
    std::vector<LabeledEvent> sorted = events;
    std::sort(sorted.begin(), sorted.end(), [](const LabeledEvent& a, const LabeledEvent& b) {
        return a.segment.start_idx < b.segment.start_idx;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].segment.start_idx < sorted[i - 1].segment.end_idx) {
            throw OverlappingEvents("to_frame_track: events overlap");
        }
    }

    FrameTrack track;
    track.trip_id = trip.trip_id;
    track.fps = fps;
    const auto n_frames = static_cast<std::size_t>(std::ceil(trip.duration_s() * fps));
    track.labels.assign(n_frames, ManeuverLabel::LaneKeeping);

    const double rate = trip.sample_rate_hz;
    for (const LabeledEvent& ev : sorted) {
        double t0 = static_cast<double>(ev.segment.start_idx) / rate;
        double t1 = static_cast<double>(ev.segment.end_idx) / rate;
        if (fps < rate) {
            // Downsampling: snap interval ends to the nearest sample time.
            t0 = std::round(t0 * rate) / rate;
            t1 = std::round(t1 * rate) / rate;
        }
        // Frames whose start time falls inside [t0, t1).
        auto first = static_cast<std::size_t>(std::ceil(t0 * fps - 1e-9));
        auto last = static_cast<std::size_t>(std::ceil(t1 * fps - 1e-9));
        for (std::size_t j = first; j < last && j < n_frames; ++j) track.labels[j] = ev.label;
    }
    return track;
}

void write_track_csv(const FrameTrack& track, const std::string& path,
                     const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
    out << "frame_idx,label\n";
    for (std::size_t j = 0; j < track.labels.size(); ++j) {
        out << j << "," << to_string(track.labels[j]) << "\n";
    }
    if (!out) throw IoFailure("failed writing " + path);
}

FrameTrack read_track_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    FrameTrack track;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line != "frame_idx,label") throw MalformedRow(path + ": bad frame-track header");
            saw_header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string idx, label;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, label, ',')) {
            throw MalformedRow(path + ": bad frame-track row");
        }
        if (std::stoull(idx) != track.labels.size()) {
            throw MalformedRow(path + ": non-contiguous frame index");
        }
        track.labels.push_back(label_from_string(label));
    }
    return track;
}

void write_track_rle_jsonl(const FrameTrack& track, const std::string& path,
                           const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    if (!config_hash.empty()) out << "{\"config_hash\":\"" << config_hash << "\"}\n";
    std::size_t start = 0;
    for (std::size_t j = 1; j <= track.labels.size(); ++j) {
        if (j == track.labels.size() || track.labels[j] != track.labels[start]) {
            out << "{\"start_frame\":" << start << ",\"end_frame\":" << j << ",\"label\":\""
                << to_string(track.labels[start]) << "\"}\n";
            start = j;
        }
    }
    if (!out) throw IoFailure("failed writing " + path);
}

}  // namespace mseg
