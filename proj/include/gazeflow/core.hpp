// Shared domain types, viewing geometry and unit conversions.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace gazeflow {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a sample stream goes backwards in time.
struct StreamOrderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad setup detected at load/lookup time (overlapping layouts, ambiguous zones).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Plain geometry
// ---------------------------------------------------------------------------

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle, origin at top-left.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    double right() const { return x + width; }
    double bottom() const { return y + height; }
    Point center() const { return {x + width / 2.0, y + height / 2.0}; }
    double area() const { return width * height; }

    /// Half-open containment: [x, x+w) x [y, y+h). Tiles a plane without double counting.
    bool contains(Point p) const { return p.x >= x && p.x < right() && p.y >= y && p.y < bottom(); }
    /// Closed containment, used for interest zones where shared borders count for both.
    bool contains_closed(Point p) const {
        return p.x >= x && p.x <= right() && p.y >= y && p.y <= bottom();
    }
    bool overlaps(const Rect& o) const {
        return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

// ---------------------------------------------------------------------------
// Samples and configuration
// ---------------------------------------------------------------------------

/// One time-stamped gaze measurement. Invalid samples (blink, track loss)
/// carry no usable position.
struct GazeSample {
    double t_ms = 0.0;
    double x_px = 0.0;
    double y_px = 0.0;
    std::optional<double> pupil_mm;
    bool valid = true;

    Point position() const { return {x_px, y_px}; }

    friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct ScreenGeometry {
    double viewing_distance_mm = 600.0;
    double px_per_mm = 3.7795;  // 96 dpi
    double width_px = 1280.0;
    double height_px = 1024.0;

    void validate() const {
        if (!(viewing_distance_mm > 0 && px_per_mm > 0 && width_px > 0 && height_px > 0))
            throw InvalidArgument("screen geometry values must be strictly positive");
    }

    friend bool operator==(const ScreenGeometry&, const ScreenGeometry&) = default;
};

struct StreamConfig {
    double rate_hz = 60.0;
    ScreenGeometry geometry{};

    double period_ms() const { return 1000.0 / rate_hz; }

    void validate() const {
        if (!(rate_hz > 0)) throw InvalidArgument("rate_hz must be positive");
        geometry.validate();
    }
};

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// On-screen extent (px) subtended by a visual angle centred on the line of sight.
/// Exact tangent form, no small-angle approximation.
inline double visual_angle_to_px(double theta_deg, const ScreenGeometry& g) {
    if (!(theta_deg >= 0.0)) throw InvalidArgument("visual angle must be non-negative");
    return 2.0 * g.viewing_distance_mm * std::tan(deg_to_rad(theta_deg) / 2.0) * g.px_per_mm;
}

/// Inverse of visual_angle_to_px.
inline double px_to_visual_angle(double extent_px, const ScreenGeometry& g) {
    if (!(extent_px >= 0.0)) throw InvalidArgument("pixel extent must be non-negative");
    return rad_to_deg(2.0 * std::atan(extent_px / (2.0 * g.viewing_distance_mm * g.px_per_mm)));
}

/// Duration covered by n samples, each sample owning one sampling period.
inline double samples_to_ms(std::int64_t n, double rate_hz) {
    if (n < 0) throw InvalidArgument("sample count must be non-negative");
    if (!(rate_hz > 0)) throw InvalidArgument("rate_hz must be positive");
    return static_cast<double>(n) * 1000.0 / rate_hz;
}

/// Rescale a sample count defined at 60 Hz to another rate: round(n * rate / 60), at least 1.
inline int rescale_count(int n_at_60hz, double rate_hz) {
    if (!(rate_hz > 0)) throw InvalidArgument("rate_hz must be positive");
    const auto scaled = static_cast<int>(std::lround(n_at_60hz * rate_hz / 60.0));
    return scaled < 1 ? 1 : scaled;
}

}  // namespace gazeflow
