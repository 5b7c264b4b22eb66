// Seeded gaze-stream generator with known ground truth.
//
// Sample k is stamped round(k * 1000 / rate_hz) ms and belongs to the
// segment whose half-open interval [start, end) contains that stamp; the
// gaze position is evaluated at the stamp. Noise is isotropic Gaussian,
// drawn with Box-Muller from std::mt19937_64 (the engine's output sequence
// is fixed by the C++ standard; the transform is spelled out below so any
// reimplementation reproduces the same streams).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazeflow/core.hpp"

namespace gazeflow {

enum class SpeedProfile { Triangular, RaisedCosine };

struct Fixate {
    Point center_px;
    double duration_ms = 0;
    double noise_sigma_px = 0;
};
struct Saccade {
    Point to_px;
    double duration_ms = 0;
    SpeedProfile profile = SpeedProfile::Triangular;
};
struct Blink {
    double duration_ms = 0;
};
using ScenarioSegment = std::variant<Fixate, Saccade, Blink>;

struct ScenarioSpec {
    double rate_hz = 60.0;
    Point start_px;  // gaze position before the first segment
    std::vector<ScenarioSegment> segments;
    std::uint64_t seed = 0;
};

struct FixationTruth {
    double start_ms, end_ms;
    Point center_px;
};
struct SaccadeTruth {
    double start_ms, end_ms;
    Point from_px, to_px;
    double peak_ms;
};
struct GroundTruth {
    std::vector<FixationTruth> fixations;
    std::vector<SaccadeTruth> saccades;
    std::vector<std::pair<double, double>> blinks;
};

struct GeneratedStream {
    std::vector<GazeSample> samples;
    GroundTruth truth;
};

/// Fraction of the amplitude covered at normalised time u in [0, 1].
inline double profile_displacement(SpeedProfile p, double u) {
    u = std::clamp(u, 0.0, 1.0);
    switch (p) {
        case SpeedProfile::Triangular: return u <= 0.5 ? 2.0 * u * u : 1.0 - 2.0 * (1.0 - u) * (1.0 - u);
        case SpeedProfile::RaisedCosine: return u - std::sin(2.0 * std::numbers::pi * u) / (2.0 * std::numbers::pi);
    }
    return u;
}

/// Normalised speed (area 1 over [0, 1]).
inline double profile_speed(SpeedProfile p, double u) {
    if (u < 0.0 || u > 1.0) return 0.0;
    switch (p) {
        case SpeedProfile::Triangular: return u <= 0.5 ? 4.0 * u : 4.0 * (1.0 - u);
        case SpeedProfile::RaisedCosine: return 1.0 - std::cos(2.0 * std::numbers::pi * u);
    }
    return 1.0;
}

/// Standard normal pairs by Box-Muller over 53-bit uniforms from mt19937_64.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline double segment_duration(const ScenarioSegment& s) {
    return std::visit([](const auto& v) { return v.duration_ms; }, s);
}

inline GeneratedStream generate(const ScenarioSpec& spec) {
    if (!(spec.rate_hz > 0)) throw InvalidArgument("rate_hz must be positive");
    for (const auto& seg : spec.segments) {
        if (!(segment_duration(seg) > 0)) throw InvalidArgument("segment durations must be positive");
        if (const auto* f = std::get_if<Fixate>(&seg); f && !(f->noise_sigma_px >= 0))
            throw InvalidArgument("noise sigma must be non-negative");
    }

    GeneratedStream out;
    GaussianSource noise(spec.seed);

    // segment start times and the gaze position at each segment start
    std::vector<double> starts;
    std::vector<Point> origins;
    double t = 0.0;
    Point pos = spec.start_px;
    for (const auto& seg : spec.segments) {
        starts.push_back(t);
        origins.push_back(pos);
        const double d = segment_duration(seg);
        if (const auto* f = std::get_if<Fixate>(&seg)) {
            out.truth.fixations.push_back({t, t + d, f->center_px});
            pos = f->center_px;
        } else if (const auto* s = std::get_if<Saccade>(&seg)) {
            out.truth.saccades.push_back({t, t + d, pos, s->to_px, t + d / 2.0});
            pos = s->to_px;
        } else {
            out.truth.blinks.emplace_back(t, t + d);
        }
        t += d;
    }
    const double total = t;

    std::size_t seg = 0;
    for (std::int64_t k = 0;; ++k) {
        const double stamp = std::round(static_cast<double>(k) * 1000.0 / spec.rate_hz);
        if (stamp >= total) break;
        while (seg + 1 < spec.segments.size() && stamp >= starts[seg + 1]) ++seg;
        const auto& segment = spec.segments[seg];
        GazeSample s;
        s.t_ms = stamp;
        if (const auto* f = std::get_if<Fixate>(&segment)) {
            s.x_px = f->center_px.x;
            s.y_px = f->center_px.y;
            if (f->noise_sigma_px > 0) {
                s.x_px += f->noise_sigma_px * noise.next();
                s.y_px += f->noise_sigma_px * noise.next();
            }
        } else if (const auto* sc = std::get_if<Saccade>(&segment)) {
            const Point from = origins[seg];
            const double u = (stamp - starts[seg]) / sc->duration_ms;
            const double frac = profile_displacement(sc->profile, u);
            s.x_px = from.x + frac * (sc->to_px.x - from.x);
            s.y_px = from.y + frac * (sc->to_px.y - from.y);
        } else {
            s.valid = false;
        }
        out.samples.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// NDJSON scenario documents
//
//   {"type":"scenario","rate_hz":60,"seed":7,"start_x":0,"start_y":0}
//   {"type":"fixate","x":100,"y":100,"duration_ms":500,"sigma_px":2}
//   {"type":"saccade","x":400,"y":100,"duration_ms":40,"profile":"triangular"}
//   {"type":"blink","duration_ms":120}
// ---------------------------------------------------------------------------

inline ScenarioSpec parse_scenario(std::istream& in) {
    ScenarioSpec spec;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InvalidArgument("scenario line " + std::to_string(n) + ": " + e.what());
        }
        const auto type = j.value("type", std::string{});
        try {
            if (type == "scenario") {
                spec.rate_hz = j.value("rate_hz", spec.rate_hz);
                spec.seed = j.value("seed", spec.seed);
                spec.start_px = {j.value("start_x", 0.0), j.value("start_y", 0.0)};
            } else if (type == "fixate") {
                spec.segments.emplace_back(Fixate{{j.at("x").get<double>(), j.at("y").get<double>()},
                                                  j.at("duration_ms").get<double>(), j.value("sigma_px", 0.0)});
            } else if (type == "saccade") {
                const auto prof = j.value("profile", std::string("triangular"));
                SpeedProfile p;
                if (prof == "triangular") p = SpeedProfile::Triangular;
                else if (prof == "raised_cosine") p = SpeedProfile::RaisedCosine;
                else throw InvalidArgument("unknown profile '" + prof + "'");
                spec.segments.emplace_back(Saccade{{j.at("x").get<double>(), j.at("y").get<double>()},
                                                   j.at("duration_ms").get<double>(), p});
            } else if (type == "blink") {
                spec.segments.emplace_back(Blink{j.at("duration_ms").get<double>()});
            } else {
                throw InvalidArgument("unknown segment type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("scenario line " + std::to_string(n) + ": " + e.what());
        }
    }
    return spec;
}

}  // namespace gazeflow
