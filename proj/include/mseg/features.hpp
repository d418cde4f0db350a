#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mseg/label.hpp"
#include "mseg/telemetry.hpp"

namespace mseg {

inline constexpr std::size_t kFeatureLen = 50;

// Fixed-length representation of one segmented event.
struct FeatureVector {
    std::array<double, kFeatureLen> values{};
    Segment source_segment{};
};

struct PcaModel {
    std::vector<double> mean;                 // kFeatureLen
    std::vector<std::vector<double>> components;  // n_components x kFeatureLen, orthonormal rows
    std::vector<double> explained_variance;   // eigenvalues, descending

    std::size_t n_components() const { return components.size(); }
};

// Linear resampling of a segment's samples onto kFeatureLen equally
// spaced points spanning [first, last]; endpoints preserved exactly.
FeatureVector resample_to_fixed(const std::vector<double>& segment_signal);

// Top-k principal components via the deflated power method on the sample
// covariance. Sign convention: each component's largest-magnitude
// coordinate is positive. Eigenvalues come out in descending order.
PcaModel pca_fit(const std::vector<FeatureVector>& vectors, std::size_t n_components);

std::vector<double> pca_transform(const PcaModel& model, const FeatureVector& v);

// Dataset interchange: 50 feature columns + trailing label column.
void write_dataset_csv(const std::vector<std::pair<FeatureVector, ManeuverLabel>>& rows,
                       const std::string& path, const std::string& config_hash = "");
std::vector<std::pair<FeatureVector, ManeuverLabel>> read_dataset_csv(const std::string& path);

}  // namespace mseg
