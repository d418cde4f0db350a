#pragma once

#include <cstdint>
#include <string>

#include "mseg/heuristics.hpp"
#include "mseg/segmentation.hpp"
#include "mseg/synth.hpp"

namespace mseg {

// Whole-pipeline configuration, loaded from a single TOML file. Every key
// has a default; unknown keys are rejected.
struct PipelineConfig {
    // [preprocess]
    double smoothing_window_s = 0.5;
    // [ema]
    EmaConfig ema;
    // [heuristics]
    HeuristicConfig heuristics;
    // [features]
    std::size_t pca_components = 10;
    // [models]
    std::size_t rf_trees = 50;
    std::size_t rf_subset_size = 0;  // 0: ceil(sqrt(feature_dim))
    // [metrics]
    double match_iou_min = 0.3;
    double duration_clamp_s = 1.0;
    // [synth]
    SynthConfig synth;
    // top level
    std::uint64_t seed = 1;

    void validate() const;
};

// Parse a TOML subset: comments, [section] tables, and scalar
// `key = value` pairs (string / integer / float / boolean).
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& toml_text, const std::string& origin = "<string>");

// Canonical serialization of every key (defaults included).
std::string config_to_toml(const PipelineConfig& cfg);

// FNV-1a hash of the canonical serialization; stamped into output files.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace mseg
