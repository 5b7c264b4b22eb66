// Gaze-contingent high-resolution region.
//
// One circular region per fixation, centred on the mean of the fixation's
// first n_anchor samples and sized to theta_deg of visual angle. The centre
// never moves during a fixation; between fixations the last region is held.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <variant>

#include "gazeflow/core.hpp"
#include "gazeflow/fixation.hpp"

namespace gazeflow {

struct StepFalloff {};
struct SmoothFalloff {
    double ramp_deg = 2.0;
};
using Falloff = std::variant<StepFalloff, SmoothFalloff>;

struct LensParams {
    int n_anchor = 4;
    double theta_deg = 5.0;  // foveal field
    Falloff falloff = StepFalloff{};

    static constexpr double kFovealDeg = 5.0;
    static constexpr double kParafovealDeg = 10.0;

    static LensParams parafoveal() { return LensParams{4, kParafovealDeg, StepFalloff{}}; }

    double ramp_deg() const {
        if (const auto* s = std::get_if<SmoothFalloff>(&falloff)) return s->ramp_deg;
        return 0.0;
    }

    void validate() const {
        if (n_anchor < 1) throw InvalidArgument("n_anchor must be >= 1");
        if (!(theta_deg > 0)) throw InvalidArgument("theta_deg must be positive");
        if (!(ramp_deg() >= 0)) throw InvalidArgument("ramp_deg must be non-negative");
    }
};

enum class LensSource { Anchor, Landing };

struct LensRegion {
    Point center_px;
    double radius_px = 0.0;
    double ramp_px = 0.0;
    bool active = false;
    std::uint64_t fixation_id = 0;
    LensSource source = LensSource::Anchor;

    friend bool operator==(const LensRegion&, const LensRegion&) = default;
};

enum class LensZone { Inside, Ramp, Outside };

struct NoRegionError : std::logic_error {
    NoRegionError() : std::logic_error("lens region is not active") {}
};

/// Inside is the open disk; the ramp band is [radius, radius + ramp).
inline LensZone classify(Point p, const LensRegion& region) {
    if (!region.active) throw NoRegionError();
    const double d = distance(p, region.center_px);
    if (d < region.radius_px) return LensZone::Inside;
    if (d < region.radius_px + region.ramp_px) return LensZone::Ramp;
    return LensZone::Outside;
}

/// Resolution weight: 1 inside, raised-cosine ramp across the band, 0 outside.
inline double resolution_weight(Point p, const LensRegion& region) {
    const double d = distance(p, region.center_px);
    if (d < region.radius_px) return 1.0;
    if (region.ramp_px <= 0.0 || d >= region.radius_px + region.ramp_px) return 0.0;
    const double u = (d - region.radius_px) / region.ramp_px;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

class ContingentLens {
public:
    ContingentLens(LensParams params, ScreenGeometry geometry) : params_(params) {
        params_.validate();
        geometry.validate();
        radius_px_ = visual_angle_to_px(params_.theta_deg, geometry) / 2.0;
        // ramp measured as extra angle beyond the disk edge on each side
        ramp_px_ = visual_angle_to_px(params_.theta_deg + 2.0 * params_.ramp_deg(), geometry) / 2.0 -
                   radius_px_;
    }

    const LensParams& params() const { return params_; }
    double radius_px() const { return radius_px_; }
    double ramp_px() const { return ramp_px_; }

    /// Returns a region only when it changes. The centre is the snapshot
    /// centroid of the first event of a fixation covering >= n_anchor samples;
    /// with provisional_n == n_anchor that is the Provisional event and the
    /// mean of exactly the first n_anchor samples.
    std::optional<LensRegion> on_fix_event(const FixEvent& e) {
        if (e.fixation_id == anchored_id_) return std::nullopt;
        if (e.kind == FixEventKind::End) return std::nullopt;
        if (e.fixation.n_samples < params_.n_anchor) return std::nullopt;
        anchored_id_ = e.fixation_id;
        region_ = LensRegion{e.fixation.centroid(), radius_px_, ramp_px_, true, e.fixation_id,
                             LensSource::Anchor};
        return region_;
    }

    /// Moves the held region to a predicted landing point ahead of the next fixation.
    LensRegion preposition(Point landing) {
        region_.center_px = landing;
        region_.radius_px = radius_px_;
        region_.ramp_px = ramp_px_;
        region_.active = true;
        region_.source = LensSource::Landing;
        return region_;
    }

    const LensRegion& region() const { return region_; }

private:
    LensParams params_;
    double radius_px_ = 0.0;
    double ramp_px_ = 0.0;
    std::uint64_t anchored_id_ = 0;  // detector window ids start at 1
    LensRegion region_{};
};

}  // namespace gazeflow
