#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mseg {

// Mean-normalization parameters: xhat = (x - mean) / (max - min).
struct NormalizationParams {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;

    bool degenerate() const { return max <= min; }
};

// Centered simple moving average with a truncated (shrinking) window at the
// boundaries; output has the same length as the input.
std::vector<double> moving_average(const std::vector<double>& signal,
                                   std::size_t window_len);

// Mean normalization. A degenerate range (max == min) yields all zeros.
std::pair<std::vector<double>, NormalizationParams> normalize(
    const std::vector<double>& signal);

}  // namespace mseg
