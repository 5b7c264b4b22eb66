// One serve session: gaze samples in, wire events out.
//
//   sample -> saccade predictor -> landing (+ lens pre-positioning)
//          -> fixation detector -> fix_* (+ lens anchoring)
//          -> dwell machines    -> dwell_* (+ map commands -> map_state)
//
// Every emitted message carries the timestamp of the sample that caused it,
// so output "t" is monotone whenever input is.
#pragma once

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "gazeflow/dwell.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/lens.hpp"
#include "gazeflow/map.hpp"
#include "gazeflow/saccade.hpp"
#include "gazeflow/trace.hpp"
#include "gazeflow/wire.hpp"

namespace gazeflow {

struct PipelineConfig {
    StreamConfig stream{};
    DetectorParams detector{};
    DwellParams overview_dwell{};  // counts at 60 Hz, rescaled to stream.rate_hz
    DwellParams button_dwell{10, 12, 22, true};
    LensParams lens{};
    PredictorParams predictor{};
    MapState map{};
    bool preposition_lens = true;
};

class Session {
public:
    explicit Session(PipelineConfig cfg, Layout layout = Layout::default_layout())
        : cfg_(cfg),
          layout_(std::move(layout)),
          detector_(cfg.detector, cfg.stream),
          overview_dwell_(cfg.overview_dwell.at_rate(cfg.stream.rate_hz), cfg.stream.rate_hz, overview_zones()),
          button_dwell_(cfg.button_dwell.at_rate(cfg.stream.rate_hz), cfg.stream.rate_hz, button_zones()),
          lens_(cfg.lens, cfg.stream.geometry),
          predictor_(cfg.predictor, cfg.stream.geometry),
          map_(clamp_focus(validated(cfg.map))) {}

    const MapState& map() const { return map_; }
    const LensRegion& lens_region() const { return lens_.region(); }
    const std::vector<Fixation>& fixations() const { return fixations_; }

    /// Handles one upstream message. Malformed input yields an error message, never a throw.
    std::vector<wire::json> on_message(const wire::json& msg) {
        std::vector<wire::json> out;
        const auto type = msg.is_object() ? msg.value("type", std::string{}) : std::string{};
        try {
            if (type == "gaze") {
                on_sample(wire::gaze_from(msg), out);
            } else if (type == "reset") {
                finish(out);
            } else if (type == "zone_stats") {
                const auto zones = widget_zones();
                const auto stats = gazeflow::zone_stats(std::span<const Fixation>(fixations_), zones);
                out.push_back(wire::zone_stats(last_t_, stats));
            } else if (type == "map_state") {
                out.push_back(wire::map_state(last_t_, map_));
            } else {
                out.push_back(wire::error(last_t_, "unknown message type '" + type + "'"));
            }
        } catch (const std::exception& e) {
            out.push_back(wire::error(last_t_, e.what()));
        }
        return out;
    }

    std::vector<wire::json> on_sample(const GazeSample& s) {
        std::vector<wire::json> out;
        on_sample(s, out);
        return out;
    }

    /// End of stream: closes any open fixation and cancels pending dwells.
    std::vector<wire::json> finish() {
        std::vector<wire::json> out;
        finish(out);
        return out;
    }

private:
    void on_sample(const GazeSample& s, std::vector<wire::json>& out) {
        if (seen_ && s.t_ms < last_t_) {
            out.push_back(wire::error(last_t_, "out-of-order sample dropped"));
            return;
        }
        seen_ = true;
        last_t_ = s.t_ms;

        if (const auto p = predictor_.push_sample(s)) {
            out.push_back(wire::landing(*p));
            if (cfg_.preposition_lens) out.push_back(wire::lens(s.t_ms, lens_.preposition(p->predicted_px)));
        }

        for (const auto& e : detector_.push_sample(s)) handle_fix_event(e, out);

        const auto window = detector_.current_window();
        for (const auto& d : overview_dwell_.on_sample_in_fixation(s, window)) handle_dwell(d, out);
        for (const auto& d : button_dwell_.on_sample_in_fixation(s, window)) handle_dwell(d, out);
    }

    void finish(std::vector<wire::json>& out) {
        for (const auto& e : detector_.flush()) handle_fix_event(e, out);
        for (const auto& d : overview_dwell_.reset(last_t_)) handle_dwell(d, out);
        for (const auto& d : button_dwell_.reset(last_t_)) handle_dwell(d, out);
        predictor_.reset();
    }

    void handle_fix_event(const FixEvent& e, std::vector<wire::json>& out) {
        if (auto j = wire::fixation(e)) out.push_back(std::move(*j));
        if (e.kind == FixEventKind::End) fixations_.push_back(e.fixation);
        if (const auto region = lens_.on_fix_event(e)) out.push_back(wire::lens(e.t_ms, *region));
    }

    void handle_dwell(const DwellEvent& d, std::vector<wire::json>& out) {
        out.push_back(wire::dwell(d));
        if (d.kind != DwellKind::Committed || !d.point_px) return;
        const auto widget = widget_from_string(d.zone_id);
        if (!widget) return;
        std::optional<MapCommand> cmd;
        switch (*widget) {
            case Widget::PanLeft: cmd = Pan{PanDirection::Left}; break;
            case Widget::PanRight: cmd = Pan{PanDirection::Right}; break;
            case Widget::PanUp: cmd = Pan{PanDirection::Up}; break;
            case Widget::PanDown: cmd = Pan{PanDirection::Down}; break;
            case Widget::Overview: cmd = FocusCommit{to_overview(*d.point_px)}; break;
            default:
                if (const auto z = zoom_index_of(*widget)) cmd = SetZoom{*z};
        }
        if (!cmd) return;
        map_ = apply_command(map_, *cmd);
        out.push_back(wire::map_state(d.t_ms, map_));
    }

    static const MapState& validated(const MapState& m) {
        m.validate();
        return m;
    }

    /// Screen position on the overview widget -> overview-map coordinates.
    Point to_overview(Point screen) const {
        const auto r = layout_.rect_of(Widget::Overview).value();
        return {(screen.x - r.x) * map_.overview_width_px / r.width,
                (screen.y - r.y) * map_.overview_height_px / r.height};
    }

    ZoneMap overview_zones() const {
        ZoneMap z;
        if (const auto r = layout_.rect_of(Widget::Overview)) z.add(std::string(to_string(Widget::Overview)), *r);
        return z;
    }

    ZoneMap button_zones() const {
        ZoneMap z;
        for (const auto& it : layout_.items())
            if (it.widget != Widget::Overview && it.widget != Widget::ZoomWindow)
                z.add(std::string(to_string(it.widget)), it.rect);
        return z;
    }

    std::vector<InterestZone> widget_zones() const {
        std::vector<InterestZone> zones;
        for (const auto& it : layout_.items())
            zones.push_back({std::string(to_string(it.widget)), it.rect, std::string(to_string(it.widget))});
        return zones;
    }

    PipelineConfig cfg_;
    Layout layout_;
    FixationDetector detector_;
    DwellMachine overview_dwell_;
    DwellMachine button_dwell_;
    ContingentLens lens_;
    SaccadePredictor predictor_;
    MapState map_;
    std::vector<Fixation> fixations_;
    double last_t_ = 0.0;
    bool seen_ = false;
};

}  // namespace gazeflow
