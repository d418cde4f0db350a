#include "mseg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mseg/errors.hpp"

namespace mseg {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Raw value text from the TOML file, keyed by "section.key".
std::map<std::string, std::string> parse_kv(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string context = origin + ":" + std::to_string(lineno);
        // Strip comments (not inside strings; values here never contain '#').
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(context + ": malformed table header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(context + ": empty table name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(context + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(context + ": expected key = value");
        std::string full = section.empty() ? key : section + "." + key;
        if (kv.count(full)) throw ConfigError(context + ": duplicate key " + full);
        kv[full] = value;
    }
    return kv;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected number, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key " + key + ": expected unsigned integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config key " + key + ": expected true/false, got '" + v + "'");
}

std::string to_str(const std::string& v, const std::string& key) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    throw ConfigError("config key " + key + ": expected quoted string, got " + v);
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(smoothing_window_s >= 0.0)) throw ConfigError("preprocess.smoothing_window_s must be >= 0");
    ema.validate();
    heuristics.validate();
    if (pca_components < 1 || pca_components > 50) {
        throw ConfigError("features.pca_components must be in [1, 50]");
    }
    if (rf_trees < 1) throw ConfigError("models.rf_trees must be >= 1");
    if (match_iou_min < 0.0 || match_iou_min > 1.0) {
        throw ConfigError("metrics.match_iou_min must be in [0,1]");
    }
}

PipelineConfig parse_config(const std::string& toml_text, const std::string& origin) {
    auto kv = parse_kv(toml_text, origin);
    PipelineConfig cfg;

    std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters;
    auto dbl = [&](const std::string& key, double& target) {
        setters[key] = [&target](const std::string& k, const std::string& v) {
            target = to_double(v, k);
        };
    };
    auto u64 = [&](const std::string& key, std::uint64_t& target) {
        setters[key] = [&target](const std::string& k, const std::string& v) {
            target = to_u64(v, k);
        };
    };
    auto sz = [&](const std::string& key, std::size_t& target) {
        setters[key] = [&target](const std::string& k, const std::string& v) {
            target = static_cast<std::size_t>(to_u64(v, k));
        };
    };
    auto bl = [&](const std::string& key, bool& target) {
        setters[key] = [&target](const std::string& k, const std::string& v) {
            target = to_bool(v, k);
        };
    };
    auto str = [&](const std::string& key, std::string& target) {
        setters[key] = [&target](const std::string& k, const std::string& v) {
            target = to_str(v, k);
        };
    };

    u64("seed", cfg.seed);
    dbl("preprocess.smoothing_window_s", cfg.smoothing_window_s);
    dbl("ema.dilation_step_s", cfg.ema.dilation_step_s);
    dbl("ema.min_window_s", cfg.ema.min_window_s);
    dbl("ema.max_window_s", cfg.ema.max_window_s);
    dbl("ema.event_energy_threshold", cfg.ema.event_energy_threshold);
    dbl("ema.nms_iou_threshold", cfg.ema.nms_iou_threshold);
    dbl("ema.time_stride_s", cfg.ema.time_stride_s);
    dbl("ema.noise_penalty_beta", cfg.ema.noise_penalty_beta);
    dbl("ema.refine_threshold_sigma", cfg.ema.refine_threshold_sigma);
    dbl("heuristics.stop_speed_eps", cfg.heuristics.stop_speed_eps);
    dbl("heuristics.k_sigma", cfg.heuristics.k_sigma);
    dbl("heuristics.min_stop_fraction", cfg.heuristics.min_stop_fraction);
    sz("features.pca_components", cfg.pca_components);
    sz("models.rf_trees", cfg.rf_trees);
    sz("models.rf_subset_size", cfg.rf_subset_size);
    dbl("metrics.match_iou_min", cfg.match_iou_min);
    dbl("metrics.duration_clamp_s", cfg.duration_clamp_s);
    str("synth.trip_id", cfg.synth.trip_id);
    dbl("synth.sample_rate_hz", cfg.synth.sample_rate_hz);
    dbl("synth.trip_len_s", cfg.synth.trip_len_s);
    sz("synth.events_per_trip", cfg.synth.events_per_trip);
    dbl("synth.noise_sigma", cfg.synth.noise_sigma);
    dbl("synth.inter_event_gap_min_s", cfg.synth.inter_event_gap_min_s);
    dbl("synth.stop_probability", cfg.synth.stop_probability);
    dbl("synth.anomaly_probability", cfg.synth.anomaly_probability);
    bl("synth.adversarial_curve_turn", cfg.synth.adversarial_curve_turn);
    dbl("synth.cruise_speed_mps", cfg.synth.cruise_speed_mps);

    for (const auto& [key, value] : kv) {
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(origin + ": unknown config key '" + key + "'");
        it->second(key, value);
    }
    cfg.synth.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string config_to_toml(const PipelineConfig& cfg) {
    std::ostringstream out;
    char buf[96];
    auto num = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
        out << buf;
    };
    out << "seed = " << cfg.seed << "\n";
    out << "\n[preprocess]\n";
    num("smoothing_window_s", cfg.smoothing_window_s);
    out << "\n[ema]\n";
    num("dilation_step_s", cfg.ema.dilation_step_s);
    num("min_window_s", cfg.ema.min_window_s);
    num("max_window_s", cfg.ema.max_window_s);
    num("event_energy_threshold", cfg.ema.event_energy_threshold);
    num("nms_iou_threshold", cfg.ema.nms_iou_threshold);
    num("time_stride_s", cfg.ema.time_stride_s);
    num("noise_penalty_beta", cfg.ema.noise_penalty_beta);
    num("refine_threshold_sigma", cfg.ema.refine_threshold_sigma);
    out << "\n[heuristics]\n";
    num("stop_speed_eps", cfg.heuristics.stop_speed_eps);
    num("k_sigma", cfg.heuristics.k_sigma);
    num("min_stop_fraction", cfg.heuristics.min_stop_fraction);
    out << "\n[features]\n";
    out << "pca_components = " << cfg.pca_components << "\n";
    out << "\n[models]\n";
    out << "rf_trees = " << cfg.rf_trees << "\n";
    out << "rf_subset_size = " << cfg.rf_subset_size << "\n";
    out << "\n[metrics]\n";
    num("match_iou_min", cfg.match_iou_min);
    num("duration_clamp_s", cfg.duration_clamp_s);
    out << "\n[synth]\n";
    out << "trip_id = \"" << cfg.synth.trip_id << "\"\n";
    num("sample_rate_hz", cfg.synth.sample_rate_hz);
    num("trip_len_s", cfg.synth.trip_len_s);
    out << "events_per_trip = " << cfg.synth.events_per_trip << "\n";
    num("noise_sigma", cfg.synth.noise_sigma);
    num("inter_event_gap_min_s", cfg.synth.inter_event_gap_min_s);
    num("stop_probability", cfg.synth.stop_probability);
    num("anomaly_probability", cfg.synth.anomaly_probability);
    out << "adversarial_curve_turn = " << (cfg.synth.adversarial_curve_turn ? "true" : "false")
        << "\n";
    num("cruise_speed_mps", cfg.synth.cruise_speed_mps);
    return out.str();
}

std::string config_hash(const PipelineConfig& cfg) {
    std::string text = config_to_toml(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mseg
