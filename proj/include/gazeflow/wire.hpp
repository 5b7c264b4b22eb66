// NDJSON wire messages. Every object carries "t" (ms) and "type";
// consumers ignore fields they do not know.
//
// upstream:   gaze, reset, zone_stats (request), map_state (request)
// downstream: fix_start, fix_update, fix_end, dwell_armed, dwell_committed,
//             dwell_cancelled, lens, landing, map_state, zone_stats, error
#pragma once

#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "gazeflow/dwell.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/lens.hpp"
#include "gazeflow/map.hpp"
#include "gazeflow/saccade.hpp"
#include "gazeflow/trace.hpp"

namespace gazeflow::wire {

using json = nlohmann::json;

inline json message(double t_ms, std::string_view type) { return json{{"t", t_ms}, {"type", type}}; }

inline json gaze(const GazeSample& s) {
    auto j = message(s.t_ms, "gaze");
    j["x"] = s.x_px, j["y"] = s.y_px, j["valid"] = s.valid;
    if (s.pupil_mm) j["pupil"] = *s.pupil_mm;
    return j;
}

/// Reads an upstream gaze message. Missing "valid" means valid.
inline GazeSample gaze_from(const json& j) {
    GazeSample s;
    s.t_ms = j.at("t").get<double>();
    s.valid = j.value("valid", true);
    if (s.valid) {
        s.x_px = j.at("x").get<double>();
        s.y_px = j.at("y").get<double>();
    } else {
        s.x_px = j.value("x", 0.0);
        s.y_px = j.value("y", 0.0);
    }
    if (j.contains("pupil") && !j["pupil"].is_null()) s.pupil_mm = j["pupil"].get<double>();
    return s;
}

/// fix_start / fix_update / fix_end; Provisional has no wire form.
inline std::optional<json> fixation(const FixEvent& e) {
    const char* type = nullptr;
    switch (e.kind) {
        case FixEventKind::Provisional: return std::nullopt;
        case FixEventKind::Start: type = "fix_start"; break;
        case FixEventKind::Update: type = "fix_update"; break;
        case FixEventKind::End: type = "fix_end"; break;
    }
    auto j = message(e.t_ms, type);
    j["fixation_id"] = e.fixation_id;
    j.update(fixation_json(e.fixation));
    return j;
}

inline json dwell(const DwellEvent& e) {
    auto j = message(e.t_ms, std::string("dwell_") + to_string(e.kind));
    j["zone"] = e.zone_id;
    if (e.point_px) j["x"] = e.point_px->x, j["y"] = e.point_px->y;
    if (e.kind != DwellKind::Cancelled) j["elapsed_ms"] = e.elapsed_ms;
    return j;
}

inline json lens(double t_ms, const LensRegion& r) {
    auto j = message(t_ms, "lens");
    j["x"] = r.center_px.x, j["y"] = r.center_px.y;
    j["radius_px"] = r.radius_px, j["ramp_px"] = r.ramp_px, j["active"] = r.active;
    j["fixation_id"] = r.fixation_id;
    j["source"] = r.source == LensSource::Anchor ? "anchor" : "landing";
    return j;
}

inline json landing(const LandingPrediction& p) {
    auto j = message(p.issued_at_ms, "landing");
    j["x"] = p.predicted_px.x, j["y"] = p.predicted_px.y;
    j["onset_x"] = p.onset_px.x, j["onset_y"] = p.onset_px.y;
    j["peak_x"] = p.peak_px.x, j["peak_y"] = p.peak_px.y;
    j["peak_speed_deg_s"] = p.peak_speed_deg_s;
    j["peak_t"] = p.peak_t_ms;
    return j;
}

inline json map_state(double t_ms, const MapState& s) {
    auto j = message(t_ms, "map_state");
    const auto r = overview_rect(s);
    j["focus_x"] = s.focus_px.x, j["focus_y"] = s.focus_px.y;
    j["zoom_index"] = s.zoom_index, j["zoom_factor"] = s.zoom_factor();
    j["pan_step_px"] = s.pan_step_px;
    j["overview_w"] = s.overview_width_px, j["overview_h"] = s.overview_height_px;
    j["rect"] = {{"x", r.x}, {"y", r.y}, {"w", r.width}, {"h", r.height}};
    return j;
}

inline json zone_stats(double t_ms, std::span<const ZoneStats> stats) {
    auto j = message(t_ms, "zone_stats");
    j["zones"] = json::array();
    for (const auto& s : stats) {
        json z{{"id", s.zone_id}, {"fixation_count", s.fixation_count}, {"total_fixation_ms", s.total_fixation_ms}};
        z["mean_pupil_mm"] = s.mean_pupil_mm ? json(*s.mean_pupil_mm) : json(nullptr);
        j["zones"].push_back(std::move(z));
    }
    return j;
}

inline json error(double t_ms, std::string_view what) {
    auto j = message(t_ms, "error");
    j["message"] = what;
    return j;
}

}  // namespace gazeflow::wire
