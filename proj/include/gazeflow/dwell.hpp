// Arm -> warn -> commit dwell activation over fixation windows.
//
// While one fixation window stays open on an activatable zone, the machine
// emits Armed once the window holds n_arm samples (point = their mean) and
// Committed once it holds n_arm + n_commit_extra samples (point = mean of
// the first n_commit_total). A window that closes, or whose running mean
// drifts out of the zone, between the two yields Cancelled.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeflow/core.hpp"
#include "gazeflow/fixation.hpp"

namespace gazeflow {

using ZoneId = std::string;

/// Counts are expressed at 60 Hz; use at_rate() for other sampling rates.
struct DwellParams {
    int n_arm = 10;           // ~170 ms before the warning circle
    int n_commit_extra = 12;  // ~200 ms more before the view changes
    int n_commit_total = 22;  // samples averaged for the committed point
    // Re-arm after each commit while the same fixation continues (button auto-repeat).
    bool repeat = false;

    void validate() const {
        if (n_arm < 1 || n_commit_extra < 1 || n_commit_total < 1)
            throw InvalidArgument("dwell sample counts must be >= 1");
        if (n_commit_total > n_arm + n_commit_extra)
            throw InvalidArgument("n_commit_total cannot exceed n_arm + n_commit_extra");
    }

    int commit_count() const { return n_arm + n_commit_extra; }

    DwellParams at_rate(double rate_hz) const {
        DwellParams p = *this;
        p.n_arm = rescale_count(n_arm, rate_hz);
        p.n_commit_extra = rescale_count(n_commit_extra, rate_hz);
        p.n_commit_total = rescale_count(n_commit_total, rate_hz);
        return p;
    }
};

enum class DwellKind { Armed, Committed, Cancelled };

inline const char* to_string(DwellKind k) {
    switch (k) {
        case DwellKind::Armed: return "armed";
        case DwellKind::Committed: return "committed";
        case DwellKind::Cancelled: return "cancelled";
    }
    return "?";
}

struct DwellEvent {
    DwellKind kind = DwellKind::Armed;
    ZoneId zone_id;
    std::optional<Point> point_px;  // absent for Cancelled
    double t_ms = 0.0;
    double elapsed_ms = 0.0;  // window length in the samples-to-ms convention
};

/// Rectangular activatable zones. A point inside two zones is a configuration error.
class ZoneMap {
public:
    struct Entry {
        ZoneId id;
        Rect rect;
    };

    ZoneMap() = default;
    explicit ZoneMap(std::vector<Entry> zones) : zones_(std::move(zones)) {}

    void add(ZoneId id, Rect rect) { zones_.push_back({std::move(id), rect}); }

    std::optional<ZoneId> lookup(Point p) const {
        const Entry* hit = nullptr;
        for (const auto& z : zones_) {
            if (!z.rect.contains(p)) continue;
            if (hit) throw ConfigError("zones '" + hit->id + "' and '" + z.id + "' overlap");
            hit = &z;
        }
        if (!hit) return std::nullopt;
        return hit->id;
    }

    const std::vector<Entry>& zones() const { return zones_; }

private:
    std::vector<Entry> zones_;
};

class DwellMachine {
public:
    DwellMachine(DwellParams params, double rate_hz, ZoneMap zones)
        : params_(params), rate_hz_(rate_hz), zones_(std::move(zones)) {
        params_.validate();
        if (!(rate_hz_ > 0)) throw InvalidArgument("rate_hz must be positive");
    }

    const DwellParams& params() const { return params_; }

    /// Feed after the detector consumed `sample`; `window` is the detector's
    /// open window at that point (empty after an invalid sample).
    std::vector<DwellEvent> on_sample_in_fixation(const GazeSample& sample, WindowView window) {
        std::vector<DwellEvent> out;
        if (window.samples.empty() || !tracking_ || window.id != window_id_) {
            cancel_pending(sample.t_ms, out);
            tracking_ = false;
            if (window.samples.empty()) return out;
            start_window(window);
        }
        if (!zone_) return out;

        const auto n = static_cast<std::int64_t>(window.samples.size()) - base_;
        const auto cycle = window.samples.subspan(static_cast<std::size_t>(base_));

        if (armed_ && !in_zone(running_mean(cycle))) {
            cancel_pending(sample.t_ms, out);
            zone_.reset();
            return out;
        }
        if (!armed_ && n == params_.n_arm) {
            const Point p = prefix_mean(cycle, params_.n_arm);
            if (!in_zone(p)) {
                zone_.reset();
                return out;
            }
            armed_ = true;
            out.push_back({DwellKind::Armed, *zone_, p, sample.t_ms, samples_to_ms(n, rate_hz_)});
        } else if (armed_ && n == params_.commit_count()) {
            const Point p = prefix_mean(cycle, params_.n_commit_total);
            if (!in_zone(p)) {
                cancel_pending(sample.t_ms, out);
                zone_.reset();
                return out;
            }
            armed_ = false;
            out.push_back({DwellKind::Committed, *zone_, p, sample.t_ms, samples_to_ms(n, rate_hz_)});
            if (params_.repeat)
                base_ += n;
            else
                zone_.reset();
        }
        return out;
    }

    /// Back to idle. A pending Armed becomes Cancelled.
    std::vector<DwellEvent> reset(double t_ms = 0.0) {
        std::vector<DwellEvent> out;
        cancel_pending(t_ms, out);
        tracking_ = false;
        zone_.reset();
        return out;
    }

    bool armed() const { return armed_; }

private:
    void start_window(WindowView window) {
        tracking_ = true;
        window_id_ = window.id;
        base_ = 0;
        armed_ = false;
        zone_ = zones_.lookup(window.samples.front().position());
    }

    void cancel_pending(double t_ms, std::vector<DwellEvent>& out) {
        if (!armed_) return;
        armed_ = false;
        out.push_back({DwellKind::Cancelled, zone_.value_or(ZoneId{}), std::nullopt, t_ms, 0.0});
    }

    bool in_zone(Point p) const {
        const auto z = zones_.lookup(p);
        return z && zone_ && *z == *zone_;
    }

    static Point prefix_mean(std::span<const GazeSample> s, int n) {
        double sx = 0, sy = 0;
        for (int i = 0; i < n; ++i) {
            sx += s[static_cast<std::size_t>(i)].x_px;
            sy += s[static_cast<std::size_t>(i)].y_px;
        }
        return {sx / n, sy / n};
    }

    static Point running_mean(std::span<const GazeSample> s) {
        return prefix_mean(s, static_cast<int>(s.size()));
    }

    DwellParams params_;
    double rate_hz_;
    ZoneMap zones_;

    bool tracking_ = false;
    std::uint64_t window_id_ = 0;
    std::int64_t base_ = 0;
    std::optional<ZoneId> zone_;
    bool armed_ = false;
};

}  // namespace gazeflow
