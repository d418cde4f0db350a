#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mseg/label.hpp"
#include "mseg/telemetry.hpp"

namespace mseg {

struct ConfusionCounts {
    std::array<std::size_t, kNumLabels> tp{};
    std::array<std::size_t, kNumLabels> fp{};
    std::array<std::size_t, kNumLabels> fn{};
};

struct MatchPair {
    std::size_t truth_idx;
    std::optional<std::size_t> pred_idx;  // nullopt: unmatched truth
};

struct PerClassScores {
    std::array<double, kNumLabels> precision{};
    std::array<double, kNumLabels> recall{};
    std::array<double, kNumLabels> f1{};
};

struct EvaluationReport {
    ConfusionCounts counts;
    PerClassScores scores;
    std::array<double, kNumLabels> duration_score{};
    std::array<double, kNumLabels> overall_accuracy{};
    std::array<bool, kNumLabels> class_present{};  // in truth or predictions
    std::vector<MatchPair> matching;

    // Macro-F1 over the six trainable event classes present in the data.
    double macro_f1_events() const;
};

// Greedy one-to-one matching by descending interval IoU; pairs below
// iou_min stay unmatched. Ties broken by earlier truth start, then earlier
// prediction start.
std::vector<MatchPair> match_events(const std::vector<LabeledEvent>& truth,
                                    const std::vector<LabeledEvent>& predicted,
                                    double iou_min);

// 0/0 cases yield 0 by convention.
PerClassScores precision_recall_f1(const ConfusionCounts& counts);

// DS = 1 - mean(e) with e = |A - P| clamped to 1 above clamp_s.
double duration_score(const std::vector<std::pair<double, double>>& pairs,
                      double clamp_s = 1.0);

double overall_accuracy(double f1, double ds);

// Full per-class evaluation of one trip's predictions against truth.
// Matched pairs with disagreeing labels count as fp for the predicted class
// and fn for the truth class; unmatched truths contribute e = 1 to their
// class's duration score.
EvaluationReport evaluate(const std::vector<LabeledEvent>& truth,
                          const std::vector<LabeledEvent>& predicted,
                          double sample_rate_hz, double iou_min,
                          double duration_clamp_s = 1.0);

// Aggregate evaluation across trips (sums counts and duration pairs before
// computing scores, so the result is order independent).
EvaluationReport evaluate_corpus(
    const std::vector<std::pair<std::vector<LabeledEvent>, std::vector<LabeledEvent>>>&
        truth_and_predicted_per_trip,
    double sample_rate_hz, double iou_min, double duration_clamp_s = 1.0);

std::string report_to_json(const EvaluationReport& report, const std::string& config_hash = "");
std::string report_to_table(const EvaluationReport& report);
std::string confusion_to_csv(const ConfusionCounts& counts);

}  // namespace mseg
