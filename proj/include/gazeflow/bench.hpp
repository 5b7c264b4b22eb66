// Latency and landing-error measurements over synthetic streams.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "gazeflow/core.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/saccade.hpp"
#include "gazeflow/synth.hpp"

namespace gazeflow::bench {

/// Latency from fixation onset to the Provisional event, measured by
/// running the detector over a steady synthetic fixation.
inline double measured_provisional_ms(double rate_hz, int provisional_n, const ScreenGeometry& g = {}) {
    ScenarioSpec spec;
    spec.rate_hz = rate_hz;
    spec.segments = {Fixate{{640, 512}, 1000, 0}};
    const auto stream = generate(spec);
    FixationDetector det({1.0, 1000.0, provisional_n}, {rate_hz, g});
    for (const auto& s : stream.samples)
        for (const auto& e : det.push_sample(s))
            if (e.kind == FixEventKind::Provisional) return samples_to_ms(e.fixation.n_samples, rate_hz);
    return std::nan("");
}

struct SaccadeCase {
    ScenarioSpec spec;
    Point from, to;
    double amplitude_deg = 0;
    double amplitude_px = 0;
    double saccade_start_ms = 0;
    double saccade_end_ms = 0;
};

/// Saccade duration grows with amplitude (roughly 2.2 ms/deg + 21 ms).
inline double saccade_duration_ms(double amplitude_deg) { return 21.0 + 2.2 * amplitude_deg; }

/// Fixation, saccade of random direction and amplitude in [min_deg, max_deg], fixation.
inline std::vector<SaccadeCase> saccade_suite(std::size_t n, double rate_hz, std::uint64_t seed,
                                              const ScreenGeometry& g = {}, double min_deg = 2.0,
                                              double max_deg = 20.0, double noise_sigma_px = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(min_deg, max_deg), dir(0.0, 2.0 * std::numbers::pi);
    std::vector<SaccadeCase> out;
    const Point center{g.width_px / 2.0, g.height_px / 2.0};
    for (std::size_t i = 0; i < n; ++i) {
        SaccadeCase c;
        c.amplitude_deg = amp(rng);
        c.amplitude_px = visual_angle_to_px(c.amplitude_deg, g);
        const double a = dir(rng);
        const Point half{std::cos(a) * c.amplitude_px / 2.0, std::sin(a) * c.amplitude_px / 2.0};
        c.from = {center.x - half.x, center.y - half.y};
        c.to = {center.x + half.x, center.y + half.y};
        const double dur = saccade_duration_ms(c.amplitude_deg);
        const auto profile = i % 2 == 0 ? SpeedProfile::Triangular : SpeedProfile::RaisedCosine;
        c.spec.rate_hz = rate_hz;
        c.spec.seed = seed + i;
        c.spec.start_px = c.from;
        c.spec.segments = {Fixate{c.from, 300, noise_sigma_px}, Saccade{c.to, dur, profile},
                           Fixate{c.to, 300, noise_sigma_px}};
        c.saccade_start_ms = 300;
        c.saccade_end_ms = 300 + dur;
        out.push_back(c);
    }
    return out;
}

struct LandingOutcome {
    std::size_t predictions = 0;
    double error_fraction = 0;  // |predicted - to| / amplitude, first prediction
    double lead_ms = 0;         // last in-saccade sample time - issue time
};

inline LandingOutcome run_landing_case(const SaccadeCase& c, const PredictorParams& params = {},
                                       const ScreenGeometry& g = {}) {
    const auto stream = generate(c.spec);
    double last_in_saccade = c.saccade_start_ms;
    for (const auto& s : stream.samples)
        if (s.t_ms >= c.saccade_start_ms && s.t_ms < c.saccade_end_ms) last_in_saccade = s.t_ms;
    SaccadePredictor pred(params, g);
    LandingOutcome o;
    for (const auto& s : stream.samples) {
        if (const auto p = pred.push_sample(s)) {
            if (o.predictions++ == 0) {
                o.error_fraction = distance(p->predicted_px, c.to) / c.amplitude_px;
                o.lead_ms = last_in_saccade - p->issued_at_ms;
            }
        }
    }
    return o;
}

struct LandingSummary {
    std::size_t saccades = 0;
    std::size_t exactly_one = 0;
    double median_error = 0;
    double max_error = 0;
    double mean_lead_ms = 0;
    double min_lead_ms = 0;
};

inline LandingSummary summarize(const std::vector<LandingOutcome>& outcomes) {
    LandingSummary s;
    s.saccades = outcomes.size();
    std::vector<double> errs;
    double lead_sum = 0;
    s.min_lead_ms = INFINITY;
    for (const auto& o : outcomes) {
        if (o.predictions == 1) ++s.exactly_one;
        if (o.predictions == 0) continue;
        errs.push_back(o.error_fraction);
        lead_sum += o.lead_ms;
        s.min_lead_ms = std::min(s.min_lead_ms, o.lead_ms);
    }
    if (errs.empty()) return s;
    std::sort(errs.begin(), errs.end());
    s.median_error = errs.size() % 2 ? errs[errs.size() / 2]
                                     : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
    s.max_error = errs.back();
    s.mean_lead_ms = lead_sum / static_cast<double>(errs.size());
    return s;
}

}  // namespace gazeflow::bench
