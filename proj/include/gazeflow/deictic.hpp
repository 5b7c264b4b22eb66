// Ranks candidate referents of a spoken command by how long the user
// fixated each zone before, during and after the utterance.
#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gazeflow/core.hpp"
#include "gazeflow/fixation.hpp"

namespace gazeflow {

/// Labeled screen region. Membership is closed: points on the border belong to the zone.
struct InterestZone {
    std::string zone_id;
    Rect rect_px;
    std::string label;

    bool contains(Point p) const { return rect_px.contains_closed(p); }

    friend bool operator==(const InterestZone&, const InterestZone&) = default;
};

struct UtteranceInterval {
    double start_ms = 0.0;
    double end_ms = 0.0;
    int deictic_count = 1;

    void validate() const {
        if (end_ms < start_ms) throw InvalidArgument("utterance ends before it starts");
        if (deictic_count < 1) throw InvalidArgument("deictic_count must be >= 1");
    }
};

struct ResolverWeights {
    double w_pre = 0.5;
    double w_during = 1.0;
    double w_post = 2.0;  // looking back to check the result is the strongest cue
    double pre_window_ms = 1500.0;
    double post_window_ms = 1500.0;

    void validate() const {
        if (w_pre < 0 || w_during < 0 || w_post < 0) throw InvalidArgument("weights must be non-negative");
        if (!(w_pre + w_during + w_post > 0)) throw InvalidArgument("total weight must be positive");
        if (pre_window_ms < 0 || post_window_ms < 0) throw InvalidArgument("windows must be non-negative");
    }
};

struct ScoreBreakdown {
    double pre_ms = 0.0;
    double during_ms = 0.0;
    double post_ms = 0.0;

    friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

struct ReferentScore {
    std::string zone_id;
    double score = 0.0;
    ScoreBreakdown breakdown;
    double last_fixation_ms = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace detail

/// Fixation time of `f` inside the pre, during and post windows of `u`.
inline ScoreBreakdown window_overlaps(const Fixation& f, const UtteranceInterval& u, const ResolverWeights& w) {
    return {detail::overlap(f.start_ms, f.end_ms, u.start_ms - w.pre_window_ms, u.start_ms),
            detail::overlap(f.start_ms, f.end_ms, u.start_ms, u.end_ms),
            detail::overlap(f.start_ms, f.end_ms, u.end_ms, u.end_ms + w.post_window_ms)};
}

inline double weighted_score(const ScoreBreakdown& b, const ResolverWeights& w) {
    return w.w_pre * b.pre_ms + w.w_during * b.during_ms + w.w_post * b.post_ms;
}

/// Zones sorted by descending score; ties go to the zone fixated most
/// recently, then to the smaller zone id.
inline std::vector<ReferentScore> rank_referents(const UtteranceInterval& utterance,
                                                 std::span<const Fixation> fixations,
                                                 std::span<const InterestZone> zones,
                                                 const ResolverWeights& weights) {
    utterance.validate();
    weights.validate();
    if (zones.empty()) throw InvalidArgument("no candidate zones");
    std::set<std::string> ids;
    for (const auto& z : zones)
        if (!ids.insert(z.zone_id).second) throw InvalidArgument("duplicate zone id '" + z.zone_id + "'");

    std::vector<ReferentScore> out;
    out.reserve(zones.size());
    for (const auto& z : zones) {
        ReferentScore r;
        r.zone_id = z.zone_id;
        for (const auto& f : fixations) {
            if (!z.contains(f.centroid())) continue;
            const auto b = window_overlaps(f, utterance, weights);
            if (b.pre_ms + b.during_ms + b.post_ms <= 0.0) continue;
            r.breakdown.pre_ms += b.pre_ms;
            r.breakdown.during_ms += b.during_ms;
            r.breakdown.post_ms += b.post_ms;
            r.last_fixation_ms = std::max(r.last_fixation_ms, f.end_ms);
        }
        r.score = weighted_score(r.breakdown, weights);
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const ReferentScore& a, const ReferentScore& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.last_fixation_ms != b.last_fixation_ms) return a.last_fixation_ms > b.last_fixation_ms;
        return a.zone_id < b.zone_id;
    });
    return out;
}

/// Assigns the k-th deictic to the k-th distinct zone in chronological
/// fixation order ("move that ... there"), restricted to zones with a
/// positive score. A fixation inside several zones goes to the best ranked one.
inline std::vector<std::string> assign_deictics(const UtteranceInterval& utterance,
                                                std::span<const Fixation> fixations,
                                                std::span<const InterestZone> zones,
                                                const ResolverWeights& weights) {
    const auto ranking = rank_referents(utterance, fixations, zones, weights);
    std::vector<std::string> out;
    for (const auto& f : fixations) {
        if (static_cast<int>(out.size()) == utterance.deictic_count) break;
        const auto b = window_overlaps(f, utterance, weights);
        if (b.pre_ms + b.during_ms + b.post_ms <= 0.0) continue;
        for (const auto& r : ranking) {
            if (r.score <= 0.0) break;
            const auto z = std::find_if(zones.begin(), zones.end(),
                                        [&](const InterestZone& iz) { return iz.zone_id == r.zone_id; });
            if (!z->contains(f.centroid())) continue;
            if (std::find(out.begin(), out.end(), r.zone_id) == out.end()) out.push_back(r.zone_id);
            break;
        }
    }
    return out;
}

}  // namespace gazeflow
