#pragma once

#include <vector>

#include "mseg/label.hpp"

namespace mseg {

struct Prediction {
    ManeuverLabel label;
    double confidence = 1.0;
};

// Modal label; ties broken by higher mean confidence, then lowest class
// index.
ManeuverLabel ensemble_vote(const std::vector<Prediction>& predictions);

}  // namespace mseg
