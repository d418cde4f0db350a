#include "mseg/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "mseg/errors.hpp"

namespace mseg {

std::vector<double> moving_average(const std::vector<double>& signal,
                                   std::size_t window_len) {
    if (window_len < 1) throw WindowTooLarge("window_len must be >= 1");
    if (window_len > signal.size()) {
        throw WindowTooLarge("window_len " + std::to_string(window_len) +
                             " exceeds signal length " + std::to_string(signal.size()));
    }
    const std::size_t n = signal.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + signal[i];

    const std::size_t half_left = (window_len - 1) / 2;
    const std::size_t half_right = window_len / 2;  // window covers [i-hl, i+hr]
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i > half_left ? i - half_left : 0;
        std::size_t hi = std::min(n - 1, i + half_right);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::pair<std::vector<double>, NormalizationParams> normalize(
    const std::vector<double>& signal) {
    if (signal.empty()) throw EmptyInput("normalize: empty signal");
    NormalizationParams params;
    params.min = signal[0];
    params.max = signal[0];
    double sum = 0.0;
    for (double v : signal) {
        params.min = std::min(params.min, v);
        params.max = std::max(params.max, v);
        sum += v;
    }
    params.mean = sum / static_cast<double>(signal.size());

    std::vector<double> out(signal.size(), 0.0);
    if (!params.degenerate()) {
        double range = params.max - params.min;
        for (std::size_t i = 0; i < signal.size(); ++i) {
            out[i] = (signal[i] - params.mean) / range;
        }
    }
    return {std::move(out), params};
}

}  // namespace mseg
