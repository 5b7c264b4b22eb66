// Dispersion-threshold (I-DT) fixation detection, streaming and batch.
//
// Dispersion is (max_x - min_x) + (max_y - min_y) over the window. The
// window grows greedily from its first sample; a sample that would push the
// dispersion over the threshold closes the window and seeds the next one.
// Invalid samples close the window. A window is a fixation once its
// duration, n_samples * 1000 / rate_hz, reaches min_duration_ms.
//
// The streaming detector and detect_batch are written independently; for
// any time-ordered stream they must yield the same fixations.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeflow/core.hpp"

namespace gazeflow {

struct DetectorParams {
    double dispersion_max_deg = 1.0;  // twice the 0.5 deg tracker accuracy
    double min_duration_ms = 100.0;
    int provisional_n = 4;

    void validate() const {
        if (!(dispersion_max_deg > 0)) throw InvalidArgument("dispersion_max_deg must be positive");
        if (!(min_duration_ms > 0)) throw InvalidArgument("min_duration_ms must be positive");
        if (provisional_n < 2) throw InvalidArgument("provisional_n must be >= 2");
    }

    double threshold_px(const ScreenGeometry& g) const {
        return visual_angle_to_px(dispersion_max_deg, g);
    }
};

struct Fixation {
    double start_ms = 0.0;  // timestamp of the first member sample
    double end_ms = 0.0;    // timestamp of the last member sample
    double centroid_x_px = 0.0;
    double centroid_y_px = 0.0;
    std::int64_t n_samples = 0;
    double dispersion_px = 0.0;
    double duration_ms = 0.0;  // n_samples * 1000 / rate_hz
    std::optional<double> mean_pupil_mm;

    Point centroid() const { return {centroid_x_px, centroid_y_px}; }

    friend bool operator==(const Fixation&, const Fixation&) = default;
};

enum class FixEventKind { Provisional, Start, Update, End };

inline const char* to_string(FixEventKind k) {
    switch (k) {
        case FixEventKind::Provisional: return "provisional";
        case FixEventKind::Start: return "start";
        case FixEventKind::Update: return "update";
        case FixEventKind::End: return "end";
    }
    return "?";
}

struct FixEvent {
    FixEventKind kind = FixEventKind::Provisional;
    std::uint64_t fixation_id = 0;  // window sequence number within the session
    double t_ms = 0.0;              // timestamp of the sample that triggered the event
    Fixation fixation;              // snapshot at event time
};

namespace detail {

inline bool reaches_duration(std::int64_t n, double rate_hz, double min_ms) {
    return samples_to_ms(n, rate_hz) >= min_ms;
}

inline void check_order(double prev_t, double t) {
    if (t < prev_t)
        throw StreamOrderError("sample timestamp " + std::to_string(t) + " precedes " +
                               std::to_string(prev_t));
}

}  // namespace detail

/// The currently open window of a streaming detector.
struct WindowView {
    std::uint64_t id = 0;
    std::span<const GazeSample> samples;
};

class FixationDetector {
public:
    FixationDetector(DetectorParams params, StreamConfig config)
        : params_(params), config_(config) {
        params_.validate();
        config_.validate();
        threshold_px_ = params_.threshold_px(config_.geometry);
    }

    const DetectorParams& params() const { return params_; }
    const StreamConfig& config() const { return config_; }
    double threshold_px() const { return threshold_px_; }

    std::vector<FixEvent> push_sample(const GazeSample& s) {
        if (have_last_) detail::check_order(last_t_, s.t_ms);
        have_last_ = true;
        last_t_ = s.t_ms;

        std::vector<FixEvent> out;
        if (!s.valid) {
            close_window(s.t_ms, out);
            return out;
        }
        if (!window_.empty()) {
            const double min_x = std::min(min_x_, s.x_px), max_x = std::max(max_x_, s.x_px);
            const double min_y = std::min(min_y_, s.y_px), max_y = std::max(max_y_, s.y_px);
            if ((max_x - min_x) + (max_y - min_y) > threshold_px_) close_window(s.t_ms, out);
        }
        append(s);

        const auto n = static_cast<std::int64_t>(window_.size());
        const bool confirmed = detail::reaches_duration(n, config_.rate_hz, params_.min_duration_ms);
        if (!provisional_sent_ && (n >= params_.provisional_n || confirmed)) {
            provisional_sent_ = true;
            out.push_back(make_event(FixEventKind::Provisional, s.t_ms));
        }
        if (started_) {
            out.push_back(make_event(FixEventKind::Update, s.t_ms));
        } else if (confirmed) {
            started_ = true;
            out.push_back(make_event(FixEventKind::Start, s.t_ms));
        }
        return out;
    }

    /// Closes an open confirmed fixation with End; silently retracts a provisional one.
    std::vector<FixEvent> flush() {
        std::vector<FixEvent> out;
        close_window(last_t_, out);
        return out;
    }

    WindowView current_window() const { return {window_id_, window_}; }

    /// Snapshot of the open window as a fixation (meaningful only when non-empty).
    Fixation snapshot() const {
        Fixation f;
        if (window_.empty()) return f;
        const auto n = static_cast<std::int64_t>(window_.size());
        f.start_ms = window_.front().t_ms;
        f.end_ms = window_.back().t_ms;
        f.centroid_x_px = sum_x_ / static_cast<double>(n);
        f.centroid_y_px = sum_y_ / static_cast<double>(n);
        f.n_samples = n;
        f.dispersion_px = (max_x_ - min_x_) + (max_y_ - min_y_);
        f.duration_ms = samples_to_ms(n, config_.rate_hz);
        if (pupil_n_ > 0) f.mean_pupil_mm = pupil_sum_ / static_cast<double>(pupil_n_);
        return f;
    }

private:
    void append(const GazeSample& s) {
        if (window_.empty()) {
            ++window_id_;
            min_x_ = max_x_ = s.x_px;
            min_y_ = max_y_ = s.y_px;
            sum_x_ = sum_y_ = pupil_sum_ = 0.0;
            pupil_n_ = 0;
        } else {
            min_x_ = std::min(min_x_, s.x_px);
            max_x_ = std::max(max_x_, s.x_px);
            min_y_ = std::min(min_y_, s.y_px);
            max_y_ = std::max(max_y_, s.y_px);
        }
        sum_x_ += s.x_px;
        sum_y_ += s.y_px;
        if (s.pupil_mm) {
            pupil_sum_ += *s.pupil_mm;
            ++pupil_n_;
        }
        window_.push_back(s);
    }

    void close_window(double t_ms, std::vector<FixEvent>& out) {
        if (started_) out.push_back(make_event(FixEventKind::End, t_ms));
        window_.clear();
        started_ = false;
        provisional_sent_ = false;
    }

    FixEvent make_event(FixEventKind kind, double t_ms) const {
        return FixEvent{kind, window_id_, t_ms, snapshot()};
    }

    DetectorParams params_;
    StreamConfig config_;
    double threshold_px_ = 0.0;

    std::vector<GazeSample> window_;
    std::uint64_t window_id_ = 0;
    double min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
    double sum_x_ = 0, sum_y_ = 0, pupil_sum_ = 0;
    std::int64_t pupil_n_ = 0;
    bool provisional_sent_ = false;
    bool started_ = false;

    bool have_last_ = false;
    double last_t_ = 0.0;
};

/// Reference I-DT over a complete recording.
inline std::vector<Fixation> detect_batch(std::span<const GazeSample> samples,
                                          const DetectorParams& params,
                                          const StreamConfig& config) {
    params.validate();
    config.validate();
    for (std::size_t i = 1; i < samples.size(); ++i)
        detail::check_order(samples[i - 1].t_ms, samples[i].t_ms);

    const double threshold = params.threshold_px(config.geometry);
    std::vector<Fixation> out;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!samples[i].valid) {
            ++i;
            continue;
        }
        double min_x = samples[i].x_px, max_x = min_x;
        double min_y = samples[i].y_px, max_y = min_y;
        std::size_t j = i;
        while (j + 1 < samples.size() && samples[j + 1].valid) {
            const auto& nx = samples[j + 1];
            const double dx = std::max(max_x, nx.x_px) - std::min(min_x, nx.x_px);
            const double dy = std::max(max_y, nx.y_px) - std::min(min_y, nx.y_px);
            if (dx + dy > threshold) break;
            min_x = std::min(min_x, nx.x_px);
            max_x = std::max(max_x, nx.x_px);
            min_y = std::min(min_y, nx.y_px);
            max_y = std::max(max_y, nx.y_px);
            ++j;
        }
        const auto n = static_cast<std::int64_t>(j - i + 1);
        if (detail::reaches_duration(n, config.rate_hz, params.min_duration_ms)) {
            Fixation f;
            f.start_ms = samples[i].t_ms;
            f.end_ms = samples[j].t_ms;
            double sx = 0, sy = 0, sp = 0;
            std::int64_t np = 0;
            for (std::size_t k = i; k <= j; ++k) {
                sx += samples[k].x_px;
                sy += samples[k].y_px;
                if (samples[k].pupil_mm) {
                    sp += *samples[k].pupil_mm;
                    ++np;
                }
            }
            f.centroid_x_px = sx / static_cast<double>(n);
            f.centroid_y_px = sy / static_cast<double>(n);
            f.n_samples = n;
            f.dispersion_px = (max_x - min_x) + (max_y - min_y);
            f.duration_ms = samples_to_ms(n, config.rate_hz);
            if (np > 0) f.mean_pupil_mm = sp / static_cast<double>(np);
            out.push_back(f);
        }
        i = j + 1;
    }
    return out;
}

/// Confirmed fixations carried by the End events of a stream.
inline std::vector<Fixation> fixations_from_events(std::span<const FixEvent> events) {
    std::vector<Fixation> out;
    for (const auto& e : events)
        if (e.kind == FixEventKind::End) out.push_back(e.fixation);
    return out;
}

}  // namespace gazeflow
