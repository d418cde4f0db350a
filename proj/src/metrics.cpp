#include "mseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mseg/errors.hpp"

namespace mseg {

double EvaluationReport::macro_f1_events() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < kNumEventClasses; ++c) {
        if (!class_present[c]) continue;
        sum += scores.f1[c];
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<MatchPair> match_events(const std::vector<LabeledEvent>& truth,
                                    const std::vector<LabeledEvent>& predicted,
                                    double iou_min) {
    struct Cand {
        double iou;
        std::size_t t, p;
    };
    std::vector<Cand> cands;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        for (std::size_t p = 0; p < predicted.size(); ++p) {
            double iou = segment_iou(truth[t].segment, predicted[p].segment);
            if (iou >= iou_min && iou > 0.0) cands.push_back({iou, t, p});
        }
    }
    std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (truth[a.t].segment.start_idx != truth[b.t].segment.start_idx) {
            return truth[a.t].segment.start_idx < truth[b.t].segment.start_idx;
        }
        return predicted[a.p].segment.start_idx < predicted[b.p].segment.start_idx;
    });

    std::vector<bool> t_used(truth.size(), false), p_used(predicted.size(), false);
    std::vector<MatchPair> out(truth.size());
    for (std::size_t t = 0; t < truth.size(); ++t) out[t] = {t, std::nullopt};
    for (const Cand& c : cands) {
        if (t_used[c.t] || p_used[c.p]) continue;
        t_used[c.t] = true;
        p_used[c.p] = true;
        out[c.t].pred_idx = c.p;
    }
    return out;
}

PerClassScores precision_recall_f1(const ConfusionCounts& counts) {
    PerClassScores s;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        double tp = static_cast<double>(counts.tp[c]);
        double fp = static_cast<double>(counts.fp[c]);
        double fn = static_cast<double>(counts.fn[c]);
        s.precision[c] = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        s.recall[c] = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        s.f1[c] = s.precision[c] + s.recall[c] > 0.0
                      ? 2.0 * s.precision[c] * s.recall[c] / (s.precision[c] + s.recall[c])
                      : 0.0;
    }
    return s;
}

double duration_score(const std::vector<std::pair<double, double>>& pairs, double clamp_s) {
    if (pairs.empty()) throw EmptyInput("duration_score: no duration pairs");
    double sum = 0.0;
    for (const auto& [a, p] : pairs) {
        double e = std::abs(a - p);
        if (e > clamp_s) e = 1.0;
        sum += e;
    }
    return 1.0 - sum / static_cast<double>(pairs.size());
}

double overall_accuracy(double f1, double ds) { return f1 * ds; }

namespace {

struct Accumulator {
    ConfusionCounts counts;
    std::array<std::vector<double>, kNumLabels> duration_errors;
    std::array<bool, kNumLabels> present{};
    std::vector<MatchPair> matching;

    void add_trip(const std::vector<LabeledEvent>& truth,
                  const std::vector<LabeledEvent>& predicted, double sample_rate_hz,
                  double iou_min, double clamp_s) {
        std::vector<MatchPair> pairs = match_events(truth, predicted, iou_min);
        std::vector<bool> p_matched(predicted.size(), false);
        for (const MatchPair& mp : pairs) {
            auto tc = static_cast<std::size_t>(truth[mp.truth_idx].label);
            present[tc] = true;
            if (mp.pred_idx) {
                p_matched[*mp.pred_idx] = true;
                const LabeledEvent& pred = predicted[*mp.pred_idx];
                auto pc = static_cast<std::size_t>(pred.label);
                present[pc] = true;
                if (pc == tc) {
                    ++counts.tp[tc];
                } else {
                    ++counts.fn[tc];
                    ++counts.fp[pc];
                }
                double e = std::abs(truth[mp.truth_idx].segment.duration_s(sample_rate_hz) -
                                    pred.segment.duration_s(sample_rate_hz));
                duration_errors[tc].push_back(e > clamp_s ? 1.0 : e);
            } else {
                ++counts.fn[tc];
                duration_errors[tc].push_back(1.0);
            }
        }
        for (std::size_t p = 0; p < predicted.size(); ++p) {
            if (p_matched[p]) continue;
            auto pc = static_cast<std::size_t>(predicted[p].label);
            present[pc] = true;
            ++counts.fp[pc];
        }
        matching.insert(matching.end(), pairs.begin(), pairs.end());
    }

    EvaluationReport finish() {
        EvaluationReport report;
        report.counts = counts;
        report.scores = precision_recall_f1(counts);
        report.class_present = present;
        report.matching = std::move(matching);
        for (std::size_t c = 0; c < kNumLabels; ++c) {
            if (!duration_errors[c].empty()) {
                double sum = 0.0;
                for (double e : duration_errors[c]) sum += e;
                report.duration_score[c] =
                    1.0 - sum / static_cast<double>(duration_errors[c].size());
            }
            report.overall_accuracy[c] =
                overall_accuracy(report.scores.f1[c], report.duration_score[c]);
        }
        return report;
    }
};

}  // namespace

EvaluationReport evaluate(const std::vector<LabeledEvent>& truth,
                          const std::vector<LabeledEvent>& predicted, double sample_rate_hz,
                          double iou_min, double duration_clamp_s) {
    Accumulator acc;
    acc.add_trip(truth, predicted, sample_rate_hz, iou_min, duration_clamp_s);
    return acc.finish();
}

EvaluationReport evaluate_corpus(
    const std::vector<std::pair<std::vector<LabeledEvent>, std::vector<LabeledEvent>>>&
        truth_and_predicted_per_trip,
    double sample_rate_hz, double iou_min, double duration_clamp_s) {
    Accumulator acc;
    for (const auto& [truth, predicted] : truth_and_predicted_per_trip) {
        acc.add_trip(truth, predicted, sample_rate_hz, iou_min, duration_clamp_s);
    }
    return acc.finish();
}

std::string report_to_json(const EvaluationReport& report, const std::string& config_hash) {
    nlohmann::ordered_json j;
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    j["macro_f1_events"] = report.macro_f1_events();
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (!report.class_present[c]) continue;
        nlohmann::ordered_json entry;
        entry["tp"] = report.counts.tp[c];
        entry["fp"] = report.counts.fp[c];
        entry["fn"] = report.counts.fn[c];
        entry["precision"] = report.scores.precision[c];
        entry["recall"] = report.scores.recall[c];
        entry["f1"] = report.scores.f1[c];
        entry["duration_score"] = report.duration_score[c];
        entry["overall_accuracy"] = report.overall_accuracy[c];
        per_class[std::string(kLabelNames[c])] = entry;
    }
    j["per_class"] = per_class;
    return j.dump(2) + "\n";
}

std::string report_to_table(const EvaluationReport& report) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-18s %6s %6s %6s %9s %9s %9s %9s %9s\n", "class", "tp",
                  "fp", "fn", "precision", "recall", "f1", "dur_score", "overall");
    out << buf;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        if (!report.class_present[c]) continue;
        std::snprintf(buf, sizeof(buf), "%-18s %6zu %6zu %6zu %9.4f %9.4f %9.4f %9.4f %9.4f\n",
                      std::string(kLabelNames[c]).c_str(), report.counts.tp[c],
                      report.counts.fp[c], report.counts.fn[c], report.scores.precision[c],
                      report.scores.recall[c], report.scores.f1[c], report.duration_score[c],
                      report.overall_accuracy[c]);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "macro F1 (event classes): %.4f\n",
                  report.macro_f1_events());
    out << buf;
    return out.str();
}

std::string confusion_to_csv(const ConfusionCounts& counts) {
    std::ostringstream out;
    out << "class,tp,fp,fn\n";
    for (std::size_t c = 0; c < kNumLabels; ++c) {
        out << kLabelNames[c] << "," << counts.tp[c] << "," << counts.fp[c] << ","
            << counts.fn[c] << "\n";
    }
    return out.str();
}

}  // namespace mseg
