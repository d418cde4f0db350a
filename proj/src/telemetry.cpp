#include "mseg/telemetry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mseg/errors.hpp"

namespace mseg {

namespace {

double parse_double(const std::string& field, const std::string& context) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw MalformedRow("non-numeric field '" + field + "' in " + context);
    }
    if (!std::isfinite(value)) {
        throw MalformedRow("non-finite value in " + context);
    }
    return value;
}

struct RawRows {
    std::vector<double> t, gyro, speed;
};

void check_monotonic(const RawRows& rows, const std::string& path) {
    for (std::size_t i = 1; i < rows.t.size(); ++i) {
        if (rows.t[i] <= rows.t[i - 1]) {
            throw NonMonotonicTime(path + ": timestamps not strictly increasing at row " +
                                   std::to_string(i));
        }
    }
}

double interp_at(const std::vector<double>& t, const std::vector<double>& y, double tq,
                 std::size_t& hint) {
    while (hint + 1 < t.size() && t[hint + 1] < tq) ++hint;
    if (tq <= t.front()) return y.front();
    if (tq >= t.back()) return y.back();
    std::size_t i = hint;
    while (t[i + 1] < tq) ++i;
    double w = (tq - t[i]) / (t[i + 1] - t[i]);
    return y[i] * (1.0 - w) + y[i + 1] * w;
}

TelemetryTrip from_rows(RawRows rows, const std::string& path) {
    if (rows.t.empty()) throw EmptyTrip(path + ": no data rows");
    check_monotonic(rows, path);

    TelemetryTrip trip;
    trip.trip_id = path;
    trip.start_epoch_s = rows.t.front();
    if (rows.t.size() == 1) {
        trip.sample_rate_hz = 1.0;
        trip.gyro_z = rows.gyro;
        trip.speed = rows.speed;
        trip.validate();
        return trip;
    }

    std::vector<double> deltas(rows.t.size() - 1);
    for (std::size_t i = 0; i + 1 < rows.t.size(); ++i) deltas[i] = rows.t[i + 1] - rows.t[i];
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    double median_dt = sorted[sorted.size() / 2];
    if (sorted.size() % 2 == 0) {
        median_dt = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    }
    trip.sample_rate_hz = 1.0 / median_dt;

    bool uniform = true;
    for (double d : deltas) {
        if (std::abs(d - median_dt) > 0.01 * median_dt) {
            uniform = false;
            break;
        }
    }

    if (uniform) {
        trip.gyro_z = std::move(rows.gyro);
        trip.speed = std::move(rows.speed);
    } else {
        // Resample onto the uniform grid anchored at the first timestamp.
        double span = rows.t.back() - rows.t.front();
        std::size_t n = static_cast<std::size_t>(std::llround(span / median_dt)) + 1;
        trip.gyro_z.resize(n);
        trip.speed.resize(n);
        std::size_t hg = 0, hs = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double tq = rows.t.front() + static_cast<double>(i) * median_dt;
            trip.gyro_z[i] = interp_at(rows.t, rows.gyro, tq, hg);
            trip.speed[i] = interp_at(rows.t, rows.speed, tq, hs);
        }
    }
    trip.validate();
    return trip;
}

}  // namespace

void TelemetryTrip::validate() const {
    if (gyro_z.empty()) throw EmptyTrip(trip_id + ": empty trip");
    if (gyro_z.size() != speed.size()) {
        throw MalformedRow(trip_id + ": gyro_z/speed length mismatch");
    }
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw MalformedRow(trip_id + ": sample_rate_hz must be positive");
    }
    for (std::size_t i = 0; i < gyro_z.size(); ++i) {
        if (!std::isfinite(gyro_z[i]) || !std::isfinite(speed[i])) {
            throw MalformedRow(trip_id + ": non-finite sample at index " + std::to_string(i));
        }
    }
}

TelemetryTrip read_trip_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);

    RawRows rows;
    std::string line;
    bool saw_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!saw_header) {
            if (line != "t_s,gyro_z,speed") {
                throw MalformedRow(path + ": expected header 't_s,gyro_z,speed', got '" + line + "'");
            }
            saw_header = true;
            continue;
        }
        std::string context = path + ":" + std::to_string(lineno);
        std::stringstream ss(line);
        std::string f0, f1, f2, extra;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2, ',')) {
            throw MalformedRow(context + ": expected 3 fields");
        }
        if (std::getline(ss, extra, ',')) throw MalformedRow(context + ": too many fields");
        rows.t.push_back(parse_double(f0, context));
        rows.gyro.push_back(parse_double(f1, context));
        rows.speed.push_back(parse_double(f2, context));
    }
    if (!saw_header) throw EmptyTrip(path + ": missing header");
    return from_rows(std::move(rows), path);
}

void write_trip_csv(const TelemetryTrip& trip, const std::string& path,
                    const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path);
    char buf[128];
    if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
    out << "t_s,gyro_z,speed\n";
    for (std::size_t i = 0; i < trip.size(); ++i) {
        double t = trip.start_epoch_s + static_cast<double>(i) / trip.sample_rate_hz;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, trip.gyro_z[i], trip.speed[i]);
        out << buf;
    }
    if (!out) throw IoFailure("failed writing " + path);
}

TelemetryTrip read_trip_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    RawRows rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRow(path + ": bad JSON line: " + e.what());
        }
        if (obj.contains("config_hash")) continue;  // provenance header line
        if (!obj.contains("t_s") || !obj.contains("gyro_z") || !obj.contains("speed")) {
            throw MalformedRow(path + ": missing key in JSONL row");
        }
        rows.t.push_back(obj["t_s"].get<double>());
        rows.gyro.push_back(obj["gyro_z"].get<double>());
        rows.speed.push_back(obj["speed"].get<double>());
    }
    return from_rows(std::move(rows), path);
}

TelemetryTrip slice(const TelemetryTrip& trip, const Segment& seg) {
    if (seg.start_idx >= seg.end_idx || seg.end_idx > trip.size()) {
        throw OutOfBounds("segment [" + std::to_string(seg.start_idx) + "," +
                          std::to_string(seg.end_idx) + ") out of bounds for trip of length " +
                          std::to_string(trip.size()));
    }
    TelemetryTrip out;
    out.trip_id = trip.trip_id;
    out.sample_rate_hz = trip.sample_rate_hz;
    out.start_epoch_s =
        trip.start_epoch_s + static_cast<double>(seg.start_idx) / trip.sample_rate_hz;
    out.gyro_z.assign(trip.gyro_z.begin() + static_cast<std::ptrdiff_t>(seg.start_idx),
                      trip.gyro_z.begin() + static_cast<std::ptrdiff_t>(seg.end_idx));
    out.speed.assign(trip.speed.begin() + static_cast<std::ptrdiff_t>(seg.start_idx),
                     trip.speed.begin() + static_cast<std::ptrdiff_t>(seg.end_idx));
    return out;
}

double segment_iou(const Segment& a, const Segment& b) {
    std::size_t lo = std::max(a.start_idx, b.start_idx);
    std::size_t hi = std::min(a.end_idx, b.end_idx);
    double inter = hi > lo ? static_cast<double>(hi - lo) : 0.0;
    double uni = static_cast<double>(a.length() + b.length()) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace mseg
