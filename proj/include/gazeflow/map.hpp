// Interaction logic of the gaze-driven map viewer: focus point, pan step,
// seven zoom levels and the overview rectangle. Image-agnostic.
#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gazeflow/core.hpp"

namespace gazeflow {

inline constexpr std::size_t kZoomLevels = 7;

struct MapState {
    Point focus_px{256.0, 256.0};  // overview-map coordinates
    int zoom_index = 0;
    double pan_step_px = 32.0;  // in overview coordinates
    double overview_width_px = 512.0;
    double overview_height_px = 512.0;
    std::array<double, kZoomLevels> zoom_factors{1, 2, 3, 4, 6, 8, 12};

    double zoom_factor() const { return zoom_factors[static_cast<std::size_t>(zoom_index)]; }

    void validate() const {
        if (zoom_index < 0 || zoom_index >= static_cast<int>(kZoomLevels))
            throw InvalidArgument("zoom_index out of range");
        if (!(overview_width_px > 0 && overview_height_px > 0))
            throw InvalidArgument("overview size must be positive");
        if (!(pan_step_px >= 0)) throw InvalidArgument("pan step must be non-negative");
        if (!(zoom_factors[0] >= 1.0)) throw InvalidArgument("zoom factors must be >= 1");
        for (std::size_t i = 1; i < kZoomLevels; ++i)
            if (!(zoom_factors[i] > zoom_factors[i - 1]))
                throw InvalidArgument("zoom factors must be strictly increasing");
    }

    friend bool operator==(const MapState&, const MapState&) = default;
};

enum class PanDirection { Left, Right, Up, Down };

struct Pan {
    PanDirection direction;
};
struct SetZoom {
    int index;
};
struct FocusCommit {
    Point point_px;
};

using MapCommand = std::variant<Pan, SetZoom, FocusCommit>;

/// Region of the overview shown in the zoom window, sized overview / zoom_factor,
/// centred on the focus after clamping it inside the overview.
inline Rect overview_rect(const MapState& s) {
    const double w = s.overview_width_px / s.zoom_factor();
    const double h = s.overview_height_px / s.zoom_factor();
    const double x = std::clamp(s.focus_px.x - w / 2.0, 0.0, s.overview_width_px - w);
    const double y = std::clamp(s.focus_px.y - h / 2.0, 0.0, s.overview_height_px - h);
    return {x, y, w, h};
}

/// Keeps the focus where the zoom rectangle fits inside the overview.
inline MapState clamp_focus(MapState s) {
    const double hw = s.overview_width_px / s.zoom_factor() / 2.0;
    const double hh = s.overview_height_px / s.zoom_factor() / 2.0;
    s.focus_px.x = std::clamp(s.focus_px.x, hw, s.overview_width_px - hw);
    s.focus_px.y = std::clamp(s.focus_px.y, hh, s.overview_height_px - hh);
    return s;
}

inline MapState apply_command(MapState s, const MapCommand& cmd) {
    struct Visitor {
        MapState& s;
        void operator()(const Pan& p) const {
            switch (p.direction) {
                case PanDirection::Left: s.focus_px.x -= s.pan_step_px; break;
                case PanDirection::Right: s.focus_px.x += s.pan_step_px; break;
                case PanDirection::Up: s.focus_px.y -= s.pan_step_px; break;
                case PanDirection::Down: s.focus_px.y += s.pan_step_px; break;
            }
        }
        void operator()(const SetZoom& z) const {
            if (z.index < 0 || z.index >= static_cast<int>(kZoomLevels))
                throw InvalidArgument("zoom index " + std::to_string(z.index) + " outside 0..6");
            s.zoom_index = z.index;
        }
        void operator()(const FocusCommit& f) const { s.focus_px = f.point_px; }
    };
    std::visit(Visitor{s}, cmd);
    return clamp_focus(s);
}

// ---------------------------------------------------------------------------
// Screen layout and hit testing
// ---------------------------------------------------------------------------

enum class Widget {
    None,
    PanLeft,
    PanRight,
    PanUp,
    PanDown,
    Zoom1,
    Zoom2,
    Zoom3,
    Zoom4,
    Zoom5,
    Zoom6,
    Zoom7,
    Overview,
    ZoomWindow,
};

inline constexpr std::array<std::string_view, 14> kWidgetNames{
    "none",  "pan_left", "pan_right", "pan_up", "pan_down", "zoom1",    "zoom2",
    "zoom3", "zoom4",    "zoom5",     "zoom6",  "zoom7",    "overview", "zoom_window"};

inline std::string_view to_string(Widget w) { return kWidgetNames[static_cast<std::size_t>(w)]; }

inline std::optional<Widget> widget_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kWidgetNames.size(); ++i)
        if (kWidgetNames[i] == name) return static_cast<Widget>(i);
    return std::nullopt;
}

inline Widget zoom_widget(int index) { return static_cast<Widget>(static_cast<int>(Widget::Zoom1) + index); }

inline std::optional<int> zoom_index_of(Widget w) {
    const int i = static_cast<int>(w) - static_cast<int>(Widget::Zoom1);
    if (i < 0 || i >= static_cast<int>(kZoomLevels)) return std::nullopt;
    return i;
}

class Layout {
public:
    struct Item {
        Widget widget;
        Rect rect;
    };

    /// Throws ConfigError when two widget rectangles overlap.
    explicit Layout(std::vector<Item> items) : items_(std::move(items)) {
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (items_[i].widget == Widget::None) throw ConfigError("layout cannot place 'none'");
            if (!(items_[i].rect.width > 0 && items_[i].rect.height > 0))
                throw ConfigError("degenerate rectangle for " + std::string(to_string(items_[i].widget)));
            for (std::size_t j = i + 1; j < items_.size(); ++j)
                if (items_[i].rect.overlaps(items_[j].rect))
                    throw ConfigError("layout widgets " + std::string(to_string(items_[i].widget)) +
                                      " and " + std::string(to_string(items_[j].widget)) + " overlap");
        }
    }

    Widget hit_test(Point p) const {
        for (const auto& it : items_)
            if (it.rect.contains(p)) return it.widget;
        return Widget::None;
    }

    std::optional<Rect> rect_of(Widget w) const {
        for (const auto& it : items_)
            if (it.widget == w) return it.rect;
        return std::nullopt;
    }

    const std::vector<Item>& items() const { return items_; }

    /// 1280x1024 arrangement: zoom buttons along the top left, overview map
    /// bottom left, zoom window on the right framed by the four pan buttons.
    static Layout default_layout() {
        std::vector<Item> items;
        for (int k = 0; k < static_cast<int>(kZoomLevels); ++k)
            items.push_back({zoom_widget(k), {32.0 + 80.0 * k, 32.0, 64.0, 64.0}});
        items.push_back({Widget::Overview, {32.0, 480.0, 512.0, 512.0}});
        items.push_back({Widget::ZoomWindow, {672.0, 192.0, 512.0, 512.0}});
        items.push_back({Widget::PanUp, {672.0, 112.0, 512.0, 64.0}});
        items.push_back({Widget::PanDown, {672.0, 720.0, 512.0, 64.0}});
        items.push_back({Widget::PanLeft, {592.0, 192.0, 64.0, 512.0}});
        items.push_back({Widget::PanRight, {1200.0, 192.0, 64.0, 512.0}});
        return Layout(std::move(items));
    }

private:
    std::vector<Item> items_;
};

inline Widget hit_test(Point p, const Layout& layout) { return layout.hit_test(p); }

}  // namespace gazeflow
