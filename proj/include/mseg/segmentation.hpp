#pragma once

#include <cstddef>
#include <vector>

#include "mseg/telemetry.hpp"

namespace mseg {

// Knobs of the energy-maximization segmenter. Defaults are pinned by the
// acceptance suite; everything is overridable from the TOML config.
struct EmaConfig {
    double dilation_step_s = 0.25;
    double min_window_s = 1.0;
    double max_window_s = 15.0;
    // Relative event threshold: candidates below
    // event_energy_threshold * median(candidate energies) are dropped.
    double event_energy_threshold = 4.0;
    double nms_iou_threshold = 0.5;
    double time_stride_s = 0.5;
    // Noise compensation for the dilation score: per-sample cost of
    // noise_penalty_beta * sigma_hat^2 so the score decays once a window
    // grows past the event (see detect_events).
    double noise_penalty_beta = 2.0;
    // Boundary refinement threshold in robust-sigma units.
    double refine_threshold_sigma = 3.0;

    void validate() const;
};

// Energies of the dilating window at one stride position.
struct EnergyProfile {
    std::size_t center_idx = 0;
    std::vector<double> window_lengths_s;  // strictly increasing
    std::vector<double> energies;          // same length
};

// Duration-scaled window energy: (s/N) * sum(x^2) over the window
// [center - w/2, center + w/2) clipped to the signal, with N the in-bounds
// sample count and s = N / sample_rate_hz.
double window_energy(const std::vector<double>& signal, std::size_t center_idx,
                     std::size_t window_len, double sample_rate_hz);

// Window energies at every dilation from min_window_s to max_window_s in
// dilation_step_s increments.
EnergyProfile energy_profile(const std::vector<double>& signal, std::size_t center_idx,
                             const EmaConfig& cfg, double sample_rate_hz);

// Greedy interval NMS: keep by descending peak_energy, reject a candidate
// whose IoU with any kept segment reaches iou_threshold.
std::vector<Segment> non_max_suppress(std::vector<Segment> candidates,
                                      double iou_threshold);

// Energy-maximization event detection over a normalized signal. Output is
// sorted by start index and pairwise below the NMS IoU threshold.
std::vector<Segment> detect_events(const std::vector<double>& signal,
                                   const EmaConfig& cfg, double sample_rate_hz);

// Fixed-duration tiling baseline: consecutive windows of window_s seconds;
// a final partial window is kept only if it spans at least half a window.
std::vector<Segment> fixed_window_segments(std::size_t signal_len, double window_s,
                                           double sample_rate_hz);

// Complement of the detected events: the non-event spans between them
// (peak_energy 0), covering the rest of [0, signal_len).
std::vector<Segment> non_event_spans(std::size_t signal_len,
                                     const std::vector<Segment>& events);

// JSONL {"start_idx","end_idx","peak_energy"} round trip. A leading
// {"config_hash"} header line is written when a hash is supplied and
// skipped on read.
void write_segments_jsonl(const std::vector<Segment>& segments, const std::string& path,
                          const std::string& config_hash = "");
std::vector<Segment> read_segments_jsonl(const std::string& path);

}  // namespace mseg
