#include "mseg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mseg/errors.hpp"

namespace mseg {

FeatureVector resample_to_fixed(const std::vector<double>& segment_signal) {
    const std::size_t n = segment_signal.size();
    if (n < 2) throw SegmentTooShort("resample_to_fixed: need at least 2 samples");
    FeatureVector fv;
    const double step = static_cast<double>(n - 1) / static_cast<double>(kFeatureLen - 1);
    for (std::size_t i = 0; i < kFeatureLen; ++i) {
        double pos = static_cast<double>(i) * step;
        auto lo = static_cast<std::size_t>(pos);
        if (lo >= n - 1) {
            fv.values[i] = segment_signal[n - 1];
            continue;
        }
        double w = pos - static_cast<double>(lo);
        fv.values[i] = segment_signal[lo] * (1.0 - w) + segment_signal[lo + 1] * w;
    }
    fv.values[kFeatureLen - 1] = segment_signal[n - 1];
    return fv;
}

namespace {

constexpr double kPowerTol = 1e-10;
constexpr int kMaxPowerIters = 10000;

// Dominant eigenpair of a symmetric matrix by power iteration.
std::pair<double, std::vector<double>> dominant_eigenpair(
    const std::vector<std::vector<double>>& m, std::uint64_t stir) {
    const std::size_t d = m.size();
    std::vector<double> v(d);
    // Deterministic quasi-random start so deflated directions are not
    // accidentally orthogonal to the iterate.
    for (std::size_t i = 0; i < d; ++i) {
        v[i] = 0.5 + 0.5 * std::sin(static_cast<double>(i * 2654435761ULL + stir * 40503ULL));
    }
    double lambda = 0.0;
    std::vector<double> next(d);
    for (int iter = 0; iter < kMaxPowerIters; ++iter) {
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += m[i][j] * v[j];
            next[i] = s;
        }
        double norm = 0.0;
        for (double x : next) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return {0.0, v};  // matrix annihilates the iterate
        for (std::size_t i = 0; i < d; ++i) next[i] /= norm;
        double diff = 0.0;
        for (std::size_t i = 0; i < d; ++i) diff += std::abs(next[i] - v[i]);
        double diff_neg = 0.0;
        for (std::size_t i = 0; i < d; ++i) diff_neg += std::abs(next[i] + v[i]);
        v = next;
        lambda = norm;
        if (std::min(diff, diff_neg) < kPowerTol) break;
    }
    return {lambda, v};
}

}  // namespace

PcaModel pca_fit(const std::vector<FeatureVector>& vectors, std::size_t n_components) {
    if (n_components < 1 || n_components > kFeatureLen) {
        throw InsufficientData("pca_fit: n_components must be in [1, 50]");
    }
    if (vectors.size() < n_components) {
        throw InsufficientData("pca_fit: need at least n_components vectors");
    }
    const std::size_t n = vectors.size();
    const std::size_t d = kFeatureLen;

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (const FeatureVector& v : vectors) {
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += v.values[j];
    }
    for (double& m : model.mean) m /= static_cast<double>(n);

    // Sample covariance (1/n); PCA directions are scale-free in the divisor.
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const FeatureVector& v : vectors) {
        for (std::size_t i = 0; i < d; ++i) {
            double ci = v.values[i] - model.mean[i];
            for (std::size_t j = i; j < d; ++j) {
                cov[i][j] += ci * (v.values[j] - model.mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n);
            cov[j][i] = cov[i][j];
        }
    }

    for (std::size_t k = 0; k < n_components; ++k) {
        auto [lambda, vec] = dominant_eigenpair(cov, k);
        // Sign convention: largest-magnitude coordinate positive.
        std::size_t imax = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::abs(vec[i]) > std::abs(vec[imax])) imax = i;
        }
        if (vec[imax] < 0.0) {
            for (double& x : vec) x = -x;
        }
        model.explained_variance.push_back(lambda);
        model.components.push_back(vec);
        // Deflate: cov -= lambda * v v^T.
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) cov[i][j] -= lambda * vec[i] * vec[j];
        }
    }
    return model;
}

std::vector<double> pca_transform(const PcaModel& model, const FeatureVector& v) {
    std::vector<double> out(model.n_components(), 0.0);
    for (std::size_t k = 0; k < model.n_components(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < kFeatureLen; ++j) {
            s += (v.values[j] - model.mean[j]) * model.components[k][j];
        }
        out[k] = s;
    }
    return out;
}

void write_dataset_csv(const std::vector<std::pair<FeatureVector, ManeuverLabel>>& rows,
                       const std::string& path, const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
    for (std::size_t j = 0; j < kFeatureLen; ++j) out << "f" << j << ",";
    out << "label\n";
    char buf[32];
    for (const auto& [fv, label] : rows) {
        for (std::size_t j = 0; j < kFeatureLen; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,", fv.values[j]);
            out << buf;
        }
        out << to_string(label) << "\n";
    }
    if (!out) throw IoFailure("failed writing " + path);
}

std::vector<std::pair<FeatureVector, ManeuverLabel>> read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::vector<std::pair<FeatureVector, ManeuverLabel>> rows;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        FeatureVector fv;
        for (std::size_t j = 0; j < kFeatureLen; ++j) {
            if (!std::getline(ss, field, ',')) throw MalformedRow(path + ": short row");
            fv.values[j] = std::stod(field);
        }
        if (!std::getline(ss, field, ',')) throw MalformedRow(path + ": missing label");
        rows.emplace_back(fv, label_from_string(field));
    }
    return rows;
}

}  // namespace mseg
