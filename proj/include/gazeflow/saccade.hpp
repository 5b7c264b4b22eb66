// Early landing-point prediction from the saccade velocity profile.
//
// Speed is a central difference over three consecutive valid samples,
// converted to deg/s. A saccade starts when two consecutive speeds exceed
// onset_deg_s; the onset point is found by walking back to the preceding
// local speed minimum. At the first strict speed decrease the peak time is
// refined with a three-point parabola, and with a symmetric velocity
// profile half the amplitude has been covered at the peak, so
//
//     landing = onset + 2 * (peak - onset).
//
// One prediction per saccade; invalid samples reset the state.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>

#include "gazeflow/core.hpp"

namespace gazeflow {

struct VelocitySample {
    double t_ms = 0.0;
    double speed_deg_s = 0.0;
    Point direction;  // unit vector when speed > 0
};

struct LandingPrediction {
    Point predicted_px;
    double issued_at_ms = 0.0;
    Point onset_px;
    Point peak_px;
    double peak_speed_deg_s = 0.0;
    double peak_t_ms = 0.0;
};

struct PredictorParams {
    double onset_deg_s = 100.0;
    int onset_run = 2;  // consecutive supra-threshold speeds needed for onset

    void validate() const {
        if (!(onset_deg_s > 0)) throw InvalidArgument("onset threshold must be positive");
        if (onset_run < 1) throw InvalidArgument("onset_run must be >= 1");
    }
};

/// Angular speed across a three-sample window: first-to-last angle over their time gap.
inline double estimate_speed(std::span<const GazeSample, 3> window, const ScreenGeometry& geometry) {
    const double dt = window[2].t_ms - window[0].t_ms;
    if (!(window[0].t_ms < window[1].t_ms && window[1].t_ms < window[2].t_ms))
        throw InvalidArgument("speed window needs strictly increasing timestamps");
    const double deg = px_to_visual_angle(distance(window[0].position(), window[2].position()), geometry);
    return deg / (dt / 1000.0);
}

inline VelocitySample estimate_velocity(std::span<const GazeSample, 3> window,
                                        const ScreenGeometry& geometry) {
    VelocitySample v;
    v.t_ms = window[1].t_ms;
    v.speed_deg_s = estimate_speed(window, geometry);
    const double dx = window[2].x_px - window[0].x_px, dy = window[2].y_px - window[0].y_px;
    const double norm = std::hypot(dx, dy);
    if (norm > 0) v.direction = {dx / norm, dy / norm};
    return v;
}

class SaccadePredictor {
public:
    SaccadePredictor(PredictorParams params, ScreenGeometry geometry)
        : params_(params), geometry_(geometry) {
        params_.validate();
        geometry_.validate();
    }

    std::optional<LandingPrediction> push_sample(const GazeSample& s) {
        if (!s.valid) {
            reset();
            return std::nullopt;
        }
        if (!history_.empty() && s.t_ms <= history_.back().sample.t_ms) {
            // duplicate stamp: no usable derivative, start over from this sample
            reset();
        }
        history_.push_back({s, -1.0});
        if (history_.size() > kHistory) history_.pop_front();
        if (history_.size() < 3) return std::nullopt;

        const std::size_t mid = history_.size() - 2;
        const GazeSample w[3] = {history_[mid - 1].sample, history_[mid].sample, history_[mid + 1].sample};
        history_[mid].speed = estimate_speed(std::span<const GazeSample, 3>(w), geometry_);
        return step(mid, s.t_ms);
    }

    void reset() {
        history_.clear();
        state_ = State::Idle;
        supra_run_ = 0;
    }

    bool in_saccade() const { return state_ != State::Idle; }

private:
    enum class State { Idle, Rising, Falling };

    struct Entry {
        GazeSample sample;
        double speed;  // < 0 until both neighbours are known
    };

    static constexpr std::size_t kHistory = 256;

    std::optional<LandingPrediction> step(std::size_t i, double now_ms) {
        const double v = history_[i].speed;
        const bool supra = v > params_.onset_deg_s;
        switch (state_) {
            case State::Idle:
                supra_run_ = supra ? supra_run_ + 1 : 0;
                if (supra_run_ >= params_.onset_run) {
                    state_ = State::Rising;
                    onset_ = onset_point(i + 1 - static_cast<std::size_t>(params_.onset_run));
                    return check_peak(i, now_ms);
                }
                return std::nullopt;
            case State::Rising:
                return check_peak(i, now_ms);
            case State::Falling:
                if (!supra) {
                    state_ = State::Idle;
                    supra_run_ = 0;
                }
                return std::nullopt;
        }
        return std::nullopt;
    }

    std::optional<LandingPrediction> check_peak(std::size_t i, double now_ms) {
        const double prev = history_[i - 1].speed;
        if (prev >= 0.0 && history_[i].speed < prev) {
            state_ = State::Falling;
            return predict(i - 1, now_ms);
        }
        return std::nullopt;
    }

    Point onset_point(std::size_t first_supra) const {
        std::size_t k = first_supra;
        while (k > 0 && history_[k - 1].speed >= 0.0 && history_[k - 1].speed < history_[k].speed) --k;
        return history_[k].sample.position();
    }

    LandingPrediction predict(std::size_t peak, double now_ms) const {
        const auto& b = history_[peak];
        const auto& c = history_[peak + 1];
        double t_peak = b.sample.t_ms;
        if (peak > 0 && history_[peak - 1].speed >= 0.0) {
            const auto& a = history_[peak - 1];
            // vertex of the parabola through (t_a, v_a), (t_b, v_b), (t_c, v_c)
            const double t0 = a.sample.t_ms - b.sample.t_ms, t2 = c.sample.t_ms - b.sample.t_ms;
            const double d0 = a.speed - b.speed, d2 = c.speed - b.speed;
            const double denom = d0 * t2 - d2 * t0;
            if (denom != 0.0) {
                const double off = 0.5 * (d0 * t2 * t2 - d2 * t0 * t0) / denom;
                t_peak = b.sample.t_ms + std::clamp(off, t0, t2);
            }
        }
        const Point peak_pt = position_at(peak, t_peak);
        LandingPrediction p;
        p.onset_px = onset_;
        p.peak_px = peak_pt;
        p.peak_speed_deg_s = b.speed;
        p.peak_t_ms = t_peak;
        p.predicted_px = {onset_.x + 2.0 * (peak_pt.x - onset_.x), onset_.y + 2.0 * (peak_pt.y - onset_.y)};
        p.issued_at_ms = now_ms;
        return p;
    }

    /// Linear interpolation of the gaze path at time t around history index i.
    Point position_at(std::size_t i, double t) const {
        std::size_t lo = i, hi = i;
        if (t < history_[i].sample.t_ms) lo = i - 1;
        else if (t > history_[i].sample.t_ms) hi = i + 1;
        const auto& p = history_[lo].sample;
        const auto& q = history_[hi].sample;
        if (lo == hi || q.t_ms == p.t_ms) return p.position();
        const double u = (t - p.t_ms) / (q.t_ms - p.t_ms);
        return {p.x_px + u * (q.x_px - p.x_px), p.y_px + u * (q.y_px - p.y_px)};
    }

    PredictorParams params_;
    ScreenGeometry geometry_;
    std::deque<Entry> history_;
    State state_ = State::Idle;
    int supra_run_ = 0;
    Point onset_;
};

}  // namespace gazeflow
