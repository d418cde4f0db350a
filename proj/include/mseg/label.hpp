#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "mseg/errors.hpp"

namespace mseg {

// Eight maneuver classes plus the internal anomaly verdict produced by the
// heuristics. The first six are the trainable "event" classes.
enum class ManeuverLabel : std::uint8_t {
    RightTurn = 0,
    LeftTurn = 1,
    RightCurve = 2,
    LeftCurve = 3,
    RightLaneChange = 4,
    LeftLaneChange = 5,
    LaneKeeping = 6,
    Stop = 7,
    Anomaly = 8,
};

inline constexpr int kNumEventClasses = 6;
inline constexpr int kNumLabels = 9;

inline constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "right_turn",       "left_turn",        "right_curve",
    "left_curve",       "right_lane_change", "left_lane_change",
    "lane_keeping",     "stop",             "anomaly",
};

inline std::string_view to_string(ManeuverLabel label) {
    return kLabelNames[static_cast<std::size_t>(label)];
}

inline ManeuverLabel label_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
        if (kLabelNames[i] == name) return static_cast<ManeuverLabel>(i);
    }
    throw MalformedRow("unknown maneuver label: " + std::string(name));
}

inline bool is_event_class(ManeuverLabel label) {
    return static_cast<int>(label) < kNumEventClasses;
}

// left <-> right of the same maneuver kind; lane keeping / stop / anomaly
// are their own mirrors.
inline ManeuverLabel mirror(ManeuverLabel label) {
    switch (label) {
        case ManeuverLabel::RightTurn: return ManeuverLabel::LeftTurn;
        case ManeuverLabel::LeftTurn: return ManeuverLabel::RightTurn;
        case ManeuverLabel::RightCurve: return ManeuverLabel::LeftCurve;
        case ManeuverLabel::LeftCurve: return ManeuverLabel::RightCurve;
        case ManeuverLabel::RightLaneChange: return ManeuverLabel::LeftLaneChange;
        case ManeuverLabel::LeftLaneChange: return ManeuverLabel::RightLaneChange;
        default: return label;
    }
}

}  // namespace mseg
