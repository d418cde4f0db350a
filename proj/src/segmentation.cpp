#include "mseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "mseg/errors.hpp"

namespace mseg {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                         v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

std::size_t window_samples(double window_s, double sample_rate_hz) {
    auto n = static_cast<long long>(std::llround(window_s * sample_rate_hz));
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

// Clip [center - n/2, center - n/2 + n) to [0, len).
void clipped_window(std::size_t center, std::size_t n, std::size_t len,
                    std::size_t& lo, std::size_t& hi) {
    std::size_t half = n / 2;
    lo = center > half ? center - half : 0;
    hi = std::min(len, lo + n);
    if (hi - lo < n && lo > 0) lo = hi > n ? hi - n : 0;  // re-anchor at the far edge
}

}  // namespace

void EmaConfig::validate() const {
    if (!(min_window_s > 0.0) || !(min_window_s < max_window_s)) {
        throw ConfigError("EmaConfig: require 0 < min_window_s < max_window_s");
    }
    if (!(dilation_step_s > 0.0)) throw ConfigError("EmaConfig: dilation_step_s must be > 0");
    if (nms_iou_threshold < 0.0 || nms_iou_threshold > 1.0) {
        throw ConfigError("EmaConfig: nms_iou_threshold must be in [0,1]");
    }
    if (!(time_stride_s > 0.0)) throw ConfigError("EmaConfig: time_stride_s must be > 0");
    if (event_energy_threshold < 0.0) {
        throw ConfigError("EmaConfig: event_energy_threshold must be >= 0");
    }
}

double window_energy(const std::vector<double>& signal, std::size_t center_idx,
                     std::size_t window_len, double sample_rate_hz) {
    if (signal.empty() || center_idx >= signal.size() || window_len == 0) {
        throw EmptyWindow("window_energy: window contains no samples");
    }
    std::size_t lo, hi;
    clipped_window(center_idx, window_len, signal.size(), lo, hi);
    if (hi <= lo) throw EmptyWindow("window_energy: window contains no samples");
    double sum_sq = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum_sq += signal[i] * signal[i];
    // s/N with s = N / rate reduces to 1 / rate; kept spelled out to match
    // the duration-scaling definition.
    double n = static_cast<double>(hi - lo);
    double s = n / sample_rate_hz;
    return (s / n) * sum_sq;
}

EnergyProfile energy_profile(const std::vector<double>& signal, std::size_t center_idx,
                             const EmaConfig& cfg, double sample_rate_hz) {
    cfg.validate();
    if (center_idx >= signal.size()) throw OutOfBounds("energy_profile: center out of bounds");
    EnergyProfile profile;
    profile.center_idx = center_idx;
    for (double w = cfg.min_window_s; w <= cfg.max_window_s + 1e-9; w += cfg.dilation_step_s) {
        profile.window_lengths_s.push_back(w);
        profile.energies.push_back(
            window_energy(signal, center_idx, window_samples(w, sample_rate_hz), sample_rate_hz));
    }
    return profile;
}

std::vector<Segment> non_max_suppress(std::vector<Segment> candidates, double iou_threshold) {
    std::stable_sort(candidates.begin(), candidates.end(), [](const Segment& a, const Segment& b) {
        if (a.peak_energy != b.peak_energy) return a.peak_energy > b.peak_energy;
        return a.start_idx < b.start_idx;
    });
    std::vector<Segment> kept;
    for (const Segment& c : candidates) {
        bool overlaps = false;
        for (const Segment& k : kept) {
            if (segment_iou(c, k) >= iou_threshold) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) kept.push_back(c);
    }
    return kept;
}

std::vector<Segment> detect_events(const std::vector<double>& signal, const EmaConfig& cfg,
                                   double sample_rate_hz) {
    cfg.validate();
    const std::size_t n = signal.size();
    const std::size_t min_win = window_samples(cfg.min_window_s, sample_rate_hz);
    if (n < min_win) {
        throw SignalTooShort("detect_events: signal shorter than min_window_s");
    }

    // Deviation from the trip median; the median tracks the lane-keeping
    // baseline, which the mean normalization does not pin at zero.
    const double baseline = median_of(signal);
    std::vector<double> dev(n), abs_dev(n);
    for (std::size_t i = 0; i < n; ++i) {
        dev[i] = signal[i] - baseline;
        abs_dev[i] = std::abs(dev[i]);
    }
    const double sigma_hat = 1.4826 * median_of(abs_dev);

    std::vector<double> prefix_d2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix_d2[i + 1] = prefix_d2[i] + dev[i] * dev[i];

    // Dilation score: deviation energy minus a per-sample noise cost, so the
    // score rises while the window gains event samples and falls once it
    // only accretes noise. The raw Eq.-2 energy is monotone in the window
    // length and cannot place the maximum at the event extent.
    const double per_sample_cost = cfg.noise_penalty_beta * sigma_hat * sigma_hat;
    auto dilation_score = [&](std::size_t lo, std::size_t hi) {
        double cnt = static_cast<double>(hi - lo);
        return (prefix_d2[hi] - prefix_d2[lo] - per_sample_cost * cnt) / sample_rate_hz;
    };

    // Precompute the dilation grid in samples.
    std::vector<std::size_t> dilations;
    for (double w = cfg.min_window_s; w <= cfg.max_window_s + 1e-9; w += cfg.dilation_step_s) {
        std::size_t ws = window_samples(w, sample_rate_hz);
        if (dilations.empty() || ws != dilations.back()) dilations.push_back(ws);
    }

    const std::size_t stride = window_samples(cfg.time_stride_s, sample_rate_hz);

    struct Candidate {
        std::size_t center;
        std::size_t lo, hi;
        double score;
        double energy;  // Eq.-2 energy of the minimum window at the center
    };
    std::vector<Candidate> cands;
    for (std::size_t c = 0; c < n; c += stride) {
        Candidate best{c, 0, 0, -1e300, 0.0};
        for (std::size_t ws : dilations) {
            std::size_t lo, hi;
            clipped_window(c, ws, n, lo, hi);
            double s = dilation_score(lo, hi);
            if (s > best.score) {  // strict: ties keep the smallest window
                best.score = s;
                best.lo = lo;
                best.hi = hi;
            }
        }
        // The localized (min-window) energy estimates the floor at this
        // stride; the dilated window would blur neighboring events in.
        best.energy = window_energy(signal, c, min_win, sample_rate_hz);
        cands.push_back(best);
    }

    // Relative event threshold against the trip-median candidate energy
    // (lane keeping dominates, so the median estimates the noise floor).
    std::vector<double> energies(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) energies[i] = cands[i].energy;
    const double floor_energy = median_of(energies);
    const double threshold = cfg.event_energy_threshold * floor_energy;

    // Event-support mask for boundary refinement: samples deviating more
    // than refine_threshold_sigma robust sigmas from the baseline, with
    // sub-second dips bridged (the zero crossing inside an S-shaped lane
    // change dips below the noise band for several tenths of a second and
    // must not split the event).
    const double refine_thr = cfg.refine_threshold_sigma * sigma_hat;
    std::vector<char> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = abs_dev[i] > refine_thr ? 1 : 0;
    const std::size_t bridge = window_samples(1.0, sample_rate_hz);
    std::size_t last_active = n;  // index of previous active sample
    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        if (last_active != n && i - last_active <= bridge + 1) {
            for (std::size_t j = last_active + 1; j < i; ++j) active[j] = 1;
        }
        last_active = i;
    }

    // Least-squares slope of |dev| over [a, b), in value units per sample.
    auto ls_slope = [&](std::size_t a, std::size_t b) -> double {
        const auto m = static_cast<double>(b - a);
        if (m < 2.0) return 0.0;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            const double x = static_cast<double>(i - a);
            sx += x;
            sy += abs_dev[i];
            sxx += x * x;
            sxy += x * abs_dev[i];
        }
        const double denom = m * sxx - sx * sx;
        return denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    };

    auto refine = [&](const Candidate& c) -> Segment {
        // Anchor at the stride center's own support run so adjacent events
        // sharing a dilated window each keep an anchor; a quiet center means
        // the candidate energy leaked in from a neighbor, so drop it.
        if (c.center >= n || !active[c.center]) return Segment{0, 0, 0.0};
        std::size_t lo = c.center, hi = c.center + 1;
        while (lo > 0 && active[lo - 1]) --lo;
        while (hi < n && active[hi]) ++hi;
        if (refine_thr > 0.0) {
            // The threshold crossing sits where |dev| first clears the noise
            // band, biased late by thr/slope. The onset ramp is quadratic
            // after smoothing, so extrapolating it to zero means extending
            // by 2*thr/slope; cap the extension at half a second.
            const std::size_t half_s = window_samples(0.5, sample_rate_hz);
            const std::size_t fit = std::min(half_s, hi - lo);
            const double gs = ls_slope(lo, lo + fit);
            if (gs > 1e-12) {
                auto ext = static_cast<std::size_t>(std::llround(2.0 * refine_thr / gs));
                ext = std::min(ext, half_s);
                lo = lo > ext ? lo - ext : 0;
            }
            const double ge = ls_slope(hi - fit, hi);
            if (ge < -1e-12) {
                auto ext = static_cast<std::size_t>(std::llround(2.0 * refine_thr / -ge));
                ext = std::min(ext, half_s);
                hi = std::min(n, hi + ext);
            }
        }
        Segment seg{lo, hi, 0.0};
        seg.peak_energy =
            window_energy(signal, lo + (hi - lo) / 2, hi - lo, sample_rate_hz);
        return seg;
    };

    std::vector<Segment> refined;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (cands[i].energy < threshold) continue;
        Segment seg = refine(cands[i]);
        if (seg.length() < min_win) continue;  // shorter than any maneuver
        if (!refined.empty() && refined.back().start_idx == seg.start_idx &&
            refined.back().end_idx == seg.end_idx) {
            continue;  // strides inside one event refine to the same run
        }
        refined.push_back(seg);
    }

    std::vector<Segment> kept = non_max_suppress(std::move(refined), cfg.nms_iou_threshold);
    std::sort(kept.begin(), kept.end(), [](const Segment& a, const Segment& b) {
        return a.start_idx < b.start_idx;
    });
    return kept;
}

std::vector<Segment> fixed_window_segments(std::size_t signal_len, double window_s,
                                           double sample_rate_hz) {
    if (!(window_s > 0.0)) throw ConfigError("fixed_window_segments: window_s must be > 0");
    const std::size_t win = window_samples(window_s, sample_rate_hz);
    std::vector<Segment> out;
    std::size_t start = 0;
    while (start < signal_len) {
        std::size_t end = std::min(signal_len, start + win);
        if (end - start == win || (end - start) * 2 >= win) {
            out.push_back(Segment{start, end, 0.0});
        }
        start += win;
    }
    return out;
}

std::vector<Segment> non_event_spans(std::size_t signal_len,
                                     const std::vector<Segment>& events) {
    std::vector<Segment> sorted = events;
    std::sort(sorted.begin(), sorted.end(),
              [](const Segment& a, const Segment& b) { return a.start_idx < b.start_idx; });
    std::vector<Segment> gaps;
    std::size_t cursor = 0;
    for (const Segment& e : sorted) {
        if (e.start_idx > cursor) gaps.push_back(Segment{cursor, e.start_idx, 0.0});
        cursor = std::max(cursor, e.end_idx);
    }
    if (cursor < signal_len) gaps.push_back(Segment{cursor, signal_len, 0.0});
    return gaps;
}

void write_segments_jsonl(const std::vector<Segment>& segments, const std::string& path,
                          const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    if (!config_hash.empty()) out << "{\"config_hash\":\"" << config_hash << "\"}\n";
    char buf[96];
    for (const Segment& s : segments) {
        std::snprintf(buf, sizeof(buf), "{\"start_idx\":%zu,\"end_idx\":%zu,\"peak_energy\":%.17g}\n",
                      s.start_idx, s.end_idx, s.peak_energy);
        out << buf;
    }
    if (!out) throw IoFailure("failed writing " + path);
}

std::vector<Segment> read_segments_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    std::vector<Segment> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line);
        if (obj.contains("config_hash")) continue;
        out.push_back(Segment{obj.at("start_idx").get<std::size_t>(),
                              obj.at("end_idx").get<std::size_t>(),
                              obj.at("peak_energy").get<double>()});
    }
    return out;
}

}  // namespace mseg
