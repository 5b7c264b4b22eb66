// Brute-force reference computations for tests. Nothing here calls the
// library routine it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gazeflow/core.hpp"
#include "gazeflow/fixation.hpp"

namespace oracle {

// Frozen from a 30-digit mpmath evaluation of 2 * d * tan(theta / 2) * px_per_mm
// at d = 600 mm, px_per_mm = 3.7795.
inline constexpr double kFiveDegPx = 198.019840467265605715;
inline constexpr double kHalfDegPx = 19.7895413122098846430;
inline constexpr double kOneDegPx = 39.5798361782074131479;
inline constexpr double kTenDegPx = 396.796084555475733284;

struct Window {
    std::size_t first, last;  // inclusive
};

/// Dispersion of samples[first..last], recomputed from scratch.
inline double dispersion(const std::vector<gazeflow::GazeSample>& s, std::size_t first, std::size_t last) {
    double min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
    for (std::size_t k = first; k <= last; ++k) {
        min_x = std::min(min_x, s[k].x_px);
        max_x = std::max(max_x, s[k].x_px);
        min_y = std::min(min_y, s[k].y_px);
        max_y = std::max(max_y, s[k].y_px);
    }
    return (max_x - min_x) + (max_y - min_y);
}

/// Greedy I-DT by exhaustive rescans: O(n^2) per window, no running extents.
inline std::vector<Window> idt_windows(const std::vector<gazeflow::GazeSample>& s, double threshold_px,
                                       std::int64_t min_samples) {
    std::vector<Window> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!s[i].valid) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1].valid && dispersion(s, i, j + 1) <= threshold_px) ++j;
        if (static_cast<std::int64_t>(j - i + 1) >= min_samples) out.push_back({i, j});
        i = j + 1;
    }
    return out;
}

/// True when some run of `m` consecutive valid samples fits within the threshold.
inline bool any_window_fits(const std::vector<gazeflow::GazeSample>& s, double threshold_px, std::size_t m) {
    for (std::size_t i = 0; i + m <= s.size(); ++i) {
        bool all_valid = true;
        for (std::size_t k = i; k < i + m; ++k) all_valid = all_valid && s[k].valid;
        if (all_valid && dispersion(s, i, i + m - 1) <= threshold_px) return true;
    }
    return false;
}

/// Smallest n with n * 1000 / rate >= min_ms, by counting.
inline std::int64_t min_samples_for(double min_ms, double rate_hz) {
    std::int64_t n = 1;
    while (static_cast<double>(n) * 1000.0 / rate_hz < min_ms) ++n;
    return n;
}

/// Millisecond-cell count of [a0, a1) intersect [b0, b1) for integer bounds.
inline double cell_overlap(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    std::int64_t n = 0;
    for (std::int64_t t = a0; t < a1; ++t)
        if (t >= b0 && t < b1) ++n;
    return static_cast<double>(n);
}

/// Trapezoid integral of f over [a, b] with n panels.
template <class F>
double integrate(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) sum += f(a + i * h);
    return sum * h;
}

/// Triangular speed profile with unit area on [0, 1].
inline double triangular_speed(double u) {
    if (u < 0 || u > 1) return 0.0;
    return u < 0.5 ? 4.0 * u : 4.0 * (1.0 - u);
}

struct ZoneBox {
    std::string id;
    double x, y, w, h;
};

struct OracleScore {
    std::string id;
    double score = 0;
    double last_end = -INFINITY;
};

/// Weighted pre/during/post fixation time per zone by millisecond cells;
/// fixation spans and windows must sit on integer milliseconds.
inline std::vector<OracleScore> deictic_scores(const std::vector<gazeflow::Fixation>& fx, const std::vector<ZoneBox>& zones,
                                               std::int64_t s, std::int64_t e, double w_pre, double w_during,
                                               double w_post, std::int64_t pre, std::int64_t post) {
    std::vector<OracleScore> out;
    for (const auto& z : zones) {
        OracleScore r{z.id};
        for (const auto& f : fx) {
            const double cx = f.centroid_x_px, cy = f.centroid_y_px;
            if (cx < z.x || cx > z.x + z.w || cy < z.y || cy > z.y + z.h) continue;
            const auto a = static_cast<std::int64_t>(f.start_ms), b = static_cast<std::int64_t>(f.end_ms);
            const double p0 = cell_overlap(a, b, s - pre, s), p1 = cell_overlap(a, b, s, e),
                         p2 = cell_overlap(a, b, e, e + post);
            if (p0 + p1 + p2 == 0) continue;
            r.score += w_pre * p0 + w_during * p1 + w_post * p2;
            r.last_end = std::max(r.last_end, f.end_ms);
        }
        out.push_back(r);
    }
    // selection sort: highest score, then latest fixation, then smallest id
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            const auto& a = out[j];
            const auto& b = out[best];
            const bool better = a.score > b.score || (a.score == b.score && a.last_end > b.last_end) ||
                                (a.score == b.score && a.last_end == b.last_end && a.id < b.id);
            if (better) best = j;
        }
        std::swap(out[i], out[best]);
    }
    return out;
}

}  // namespace oracle
