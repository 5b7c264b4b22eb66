#include <gtest/gtest.h>

#include <random>

#include "gazeflow/map.hpp"

using namespace gazeflow;

TEST(MapState, InitialRectCoversOverview) {
    const MapState s;
    EXPECT_EQ(overview_rect(s), (Rect{0, 0, 512, 512}));
}

TEST(MapState, ZoomFourCentredOnFocus) {
    const auto s = apply_command(MapState{}, SetZoom{3});
    EXPECT_EQ(s.zoom_factor(), 4.0);
    EXPECT_EQ(overview_rect(s), (Rect{192, 192, 128, 128}));
}

TEST(MapState, FocusCommitClampsToCorner) {
    auto s = apply_command(MapState{}, SetZoom{1});
    s = apply_command(s, FocusCommit{{0, 0}});
    EXPECT_EQ(s.focus_px, (Point{128, 128}));
    EXPECT_EQ(overview_rect(s), (Rect{0, 0, 256, 256}));
}

TEST(MapState, PanMovesByStep) {
    auto s = apply_command(MapState{}, SetZoom{6});
    s = apply_command(s, Pan{PanDirection::Right});
    EXPECT_EQ(s.focus_px, (Point{288, 256}));
    s = apply_command(s, Pan{PanDirection::Up});
    EXPECT_EQ(s.focus_px, (Point{288, 224}));
}

TEST(MapState, PanAtFactorOneIsNoOp) {
    const auto s = apply_command(MapState{}, Pan{PanDirection::Left});
    EXPECT_EQ(s.focus_px, (Point{256, 256}));
}

TEST(MapState, BadZoomIndexRejected) {
    EXPECT_THROW(apply_command(MapState{}, SetZoom{7}), InvalidArgument);
    EXPECT_THROW(apply_command(MapState{}, SetZoom{-1}), InvalidArgument);
}

TEST(MapState, ZoomOutAfterFocusStillInside) {
    auto s = apply_command(MapState{}, SetZoom{6});
    s = apply_command(s, FocusCommit{{500, 10}});
    s = apply_command(s, SetZoom{0});
    EXPECT_EQ(overview_rect(s), (Rect{0, 0, 512, 512}));
}

TEST(MapProperties, RandomSequencesStayInBounds) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> kind(0, 2), dir(0, 3), zoom(0, 6), len(1, 60);
    std::uniform_real_distribution<double> pt(-200, 700);
    for (int trial = 0; trial < 10000; ++trial) {
        MapState s;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) {
            MapCommand cmd;
            switch (kind(rng)) {
                case 0: cmd = Pan{static_cast<PanDirection>(dir(rng))}; break;
                case 1: cmd = SetZoom{zoom(rng)}; break;
                default: cmd = FocusCommit{{pt(rng), pt(rng)}}; break;
            }
            s = apply_command(s, cmd);
            const Rect r = overview_rect(s);
            ASSERT_GE(r.x, 0.0);
            ASSERT_GE(r.y, 0.0);
            ASSERT_LE(r.x, s.overview_width_px - r.width);
            ASSERT_LE(r.y, s.overview_height_px - r.height);
            ASSERT_EQ(r.width, 512.0 / s.zoom_factor());
            ASSERT_EQ(r.height, 512.0 / s.zoom_factor());
        }
    }
}

TEST(Layout, DefaultHasNoOverlapAndHitsEachWidget) {
    const auto layout = Layout::default_layout();
    for (const auto& it : layout.items()) {
        EXPECT_EQ(layout.hit_test(it.rect.center()), it.widget);
        EXPECT_EQ(hit_test({it.rect.x, it.rect.y}, layout), it.widget);
        // right and bottom edges are outside (half-open)
        EXPECT_NE(layout.hit_test({it.rect.right(), it.rect.y}), it.widget);
    }
    EXPECT_EQ(layout.hit_test({5, 5}), Widget::None);
}

TEST(Layout, OverlapIsConfigError) {
    EXPECT_THROW(Layout({{Widget::Overview, {0, 0, 100, 100}}, {Widget::Zoom1, {99, 99, 10, 10}}}), ConfigError);
    EXPECT_NO_THROW(Layout({{Widget::Overview, {0, 0, 100, 100}}, {Widget::Zoom1, {100, 0, 10, 10}}}));
}

TEST(Layout, HitTestAgreesWithBruteForceGrid) {
    const auto layout = Layout::default_layout();
    for (double y = 0; y < 1024; y += 7.5)
        for (double x = 0; x < 1280; x += 7.5) {
            int hits = 0;
            Widget expect = Widget::None;
            for (const auto& it : layout.items())
                if (x >= it.rect.x && x < it.rect.x + it.rect.width && y >= it.rect.y && y < it.rect.y + it.rect.height) {
                    ++hits;
                    expect = it.widget;
                }
            ASSERT_LE(hits, 1);
            ASSERT_EQ(layout.hit_test({x, y}), expect);
        }
}

TEST(Widget, NamesRoundTrip) {
    for (int i = 0; i < 14; ++i) {
        const auto w = static_cast<Widget>(i);
        EXPECT_EQ(widget_from_string(to_string(w)), w);
    }
    EXPECT_FALSE(widget_from_string("bogus").has_value());
    EXPECT_EQ(zoom_index_of(zoom_widget(4)), 4);
    EXPECT_FALSE(zoom_index_of(Widget::Overview).has_value());
}
