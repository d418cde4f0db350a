#include "mseg/ensemble.hpp"

#include <array>

#include "mseg/errors.hpp"

namespace mseg {

ManeuverLabel ensemble_vote(const std::vector<Prediction>& predictions) {
    if (predictions.empty()) throw EmptyInput("ensemble_vote: no predictions");
    std::array<std::size_t, kNumLabels> counts{};
    std::array<double, kNumLabels> conf_sum{};
    for (const Prediction& p : predictions) {
        auto c = static_cast<std::size_t>(p.label);
        ++counts[c];
        conf_sum[c] += p.confidence;
    }
    std::size_t best = 0;
    bool have = false;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (counts[c] == 0) continue;
        if (!have) {
            best = c;
            have = true;
            continue;
        }
        double mean_c = conf_sum[c] / static_cast<double>(counts[c]);
        double mean_b = conf_sum[best] / static_cast<double>(counts[best]);
        if (counts[c] > counts[best] ||
            (counts[c] == counts[best] && mean_c > mean_b)) {
            best = c;
        }
    }
    return static_cast<ManeuverLabel>(best);
}

}  // namespace mseg
