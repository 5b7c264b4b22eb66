#include <gtest/gtest.h>

#include <random>

#include "gazeflow/fixation.hpp"
#include "gazeflow/synth.hpp"
#include "oracles.hpp"

using namespace gazeflow;

namespace {

std::vector<GazeSample> constant(int n, Point p, double rate = 60.0, double t0 = 0.0) {
    std::vector<GazeSample> s;
    for (int i = 0; i < n; ++i) s.push_back({t0 + i * 1000.0 / rate, p.x, p.y, std::nullopt, true});
    return s;
}

struct Run {
    std::vector<FixEvent> events;
    std::vector<Fixation> fixations;
};

Run run_stream(const std::vector<GazeSample>& samples, DetectorParams p, StreamConfig c) {
    FixationDetector det(p, c);
    Run r;
    for (const auto& s : samples)
        for (auto& e : det.push_sample(s)) r.events.push_back(e);
    for (auto& e : det.flush()) r.events.push_back(e);
    r.fixations = fixations_from_events(r.events);
    return r;
}

const StreamConfig k60{60.0, ScreenGeometry{}};

}  // namespace

TEST(FixationDetector, ConstantInputEventSequence) {
    const auto samples = constant(10, {100, 100});
    FixationDetector det({1.0, 100.0, 4}, k60);
    std::vector<std::pair<int, FixEventKind>> seen;
    for (int i = 0; i < 10; ++i)
        for (const auto& e : det.push_sample(samples[static_cast<std::size_t>(i)])) seen.emplace_back(i + 1, e.kind);
    const auto tail = det.flush();

    ASSERT_GE(seen.size(), 2u);
    EXPECT_EQ(seen[0], std::make_pair(4, FixEventKind::Provisional));
    EXPECT_EQ(seen[1], std::make_pair(6, FixEventKind::Start));
    for (std::size_t k = 2; k < seen.size(); ++k) {
        EXPECT_EQ(seen[k].second, FixEventKind::Update);
        EXPECT_EQ(seen[k].first, static_cast<int>(k) + 5);
    }
    EXPECT_EQ(seen.size(), 6u);  // provisional, start, updates for samples 7..10
    ASSERT_EQ(tail.size(), 1u);
    EXPECT_EQ(tail[0].kind, FixEventKind::End);
    EXPECT_EQ(tail[0].fixation.centroid(), (Point{100, 100}));
    EXPECT_EQ(tail[0].fixation.dispersion_px, 0.0);
    EXPECT_EQ(tail[0].fixation.n_samples, 10);
}

TEST(FixationDetector, BelowProvisionalThenDivergenceNeverStarts) {
    auto samples = constant(3, {100, 100});
    for (int i = 0; i < 3; ++i)
        samples.push_back({50.0 + 17.0 * i, 100.0 + 300.0 * (i + 1), 100.0, std::nullopt, true});
    const auto r = run_stream(samples, {1.0, 100.0, 4}, k60);
    for (const auto& e : r.events) {
        EXPECT_NE(e.kind, FixEventKind::Start);
        EXPECT_NE(e.kind, FixEventKind::Provisional);
    }
}

TEST(FixationDetector, FlushAfterOpenConfirmedFixation) {
    FixationDetector det({1.0, 100.0, 4}, k60);
    for (const auto& s : constant(8, {5, 5})) det.push_sample(s);
    const auto a = det.flush();
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].kind, FixEventKind::End);
    EXPECT_TRUE(det.flush().empty());
}

TEST(FixationDetector, FlushRetractsProvisional) {
    FixationDetector det({1.0, 100.0, 2}, k60);
    for (const auto& s : constant(3, {5, 5})) det.push_sample(s);
    EXPECT_TRUE(det.flush().empty());
    EXPECT_TRUE(det.flush().empty());
}

TEST(FixationDetector, DecreasingTimestampIsStreamOrderError) {
    FixationDetector det({}, k60);
    det.push_sample({100, 0, 0, std::nullopt, true});
    EXPECT_THROW(det.push_sample({99, 0, 0, std::nullopt, true}), StreamOrderError);
    std::vector<GazeSample> bad{{10, 0, 0, {}, true}, {5, 0, 0, {}, true}};
    EXPECT_THROW(detect_batch(bad, {}, k60), StreamOrderError);
}

TEST(FixationDetector, InvalidSampleEndsConfirmedFixation) {
    auto samples = constant(8, {5, 5});
    samples.push_back({8 * 1000.0 / 60, 0, 0, std::nullopt, false});
    FixationDetector det({1.0, 100.0, 4}, k60);
    std::vector<FixEvent> ev;
    for (const auto& s : samples)
        for (auto& e : det.push_sample(s)) ev.push_back(e);
    ASSERT_FALSE(ev.empty());
    EXPECT_EQ(ev.back().kind, FixEventKind::End);
    EXPECT_EQ(ev.back().fixation.n_samples, 8);
    EXPECT_TRUE(det.current_window().samples.empty());
}

TEST(FixationDetector, ParamValidation) {
    EXPECT_THROW(FixationDetector({0.0, 100, 4}, k60), InvalidArgument);
    EXPECT_THROW(FixationDetector({1.0, 0, 4}, k60), InvalidArgument);
    EXPECT_THROW(FixationDetector({1.0, 100, 1}, k60), InvalidArgument);
}

TEST(FixationDetector, ProvisionalLatencyQuartersAtTwoForty) {
    const auto latency = [](double rate) {
        FixationDetector det({1.0, 1000.0, 4}, {rate, {}});
        for (const auto& s : constant(20, {300, 300}, rate))
            for (const auto& e : det.push_sample(s))
                if (e.kind == FixEventKind::Provisional) return samples_to_ms(e.fixation.n_samples, rate);
        return -1.0;
    };
    EXPECT_NEAR(latency(60), 66.67, 0.01);
    EXPECT_NEAR(latency(240), 16.67, 0.01);
    EXPECT_DOUBLE_EQ(latency(240) * 4.0, latency(60));
}

TEST(DetectBatch, EmptyStream) { EXPECT_TRUE(detect_batch({}, {}, k60).empty()); }

TEST(DetectBatch, UniformNoiseYieldsNothing) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> x(0, 1280), y(0, 1024);
    std::vector<GazeSample> s;
    for (int i = 0; i < 600; ++i) s.push_back({i * 1000.0 / 60, x(rng), y(rng), std::nullopt, true});
    const DetectorParams p{};
    const double thr = oracle::kOneDegPx;
    ASSERT_FALSE(oracle::any_window_fits(s, thr, static_cast<std::size_t>(oracle::min_samples_for(p.min_duration_ms, 60))));
    EXPECT_TRUE(detect_batch(s, p, k60).empty());
}

TEST(DetectBatch, TwoClustersMatchBruteForceScan) {
    auto s = constant(20, {50, 50});
    for (const auto& x : constant(20, {400, 400}, 60, 20 * 1000.0 / 60)) s.push_back(x);
    const DetectorParams p{};
    const auto fx = detect_batch(s, p, k60);
    const auto w = oracle::idt_windows(s, oracle::kOneDegPx, oracle::min_samples_for(p.min_duration_ms, 60));
    ASSERT_EQ(fx.size(), 2u);
    ASSERT_EQ(w.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(fx[k].n_samples, static_cast<std::int64_t>(w[k].last - w[k].first + 1));
        EXPECT_EQ(fx[k].start_ms, s[w[k].first].t_ms);
        EXPECT_EQ(fx[k].end_ms, s[w[k].last].t_ms);
    }
    EXPECT_EQ(fx[0].centroid(), (Point{50, 50}));
    EXPECT_EQ(fx[1].centroid(), (Point{400, 400}));
    EXPECT_EQ(fx[0].n_samples, 20);
}

TEST(DetectBatch, TwoClustersStreamAgrees) {
    ScenarioSpec spec;
    spec.rate_hz = 60;
    spec.seed = 99;
    spec.start_px = {200, 200};
    spec.segments = {Fixate{{200, 200}, 200, 3}, Saccade{{800, 600}, 50, SpeedProfile::Triangular},
                     Fixate{{800, 600}, 200, 3}};
    const auto s = generate(spec).samples;
    const DetectorParams p{};
    const auto batch = detect_batch(s, p, k60);
    const auto stream = run_stream(s, p, k60).fixations;
    ASSERT_EQ(batch.size(), 2u);
    EXPECT_EQ(stream, batch);
}

TEST(DetectBatch, MatchesBruteForceOnRandomStreams) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        ScenarioSpec spec;
        spec.rate_hz = trial % 2 ? 60 : 240;
        spec.seed = static_cast<std::uint64_t>(trial);
        std::uniform_real_distribution<double> px(50, 1200), dur(30, 400), sig(0, 12);
        spec.start_px = {px(rng), px(rng)};
        for (int k = 0; k < 6; ++k) {
            spec.segments.push_back(Fixate{{px(rng), px(rng)}, dur(rng), sig(rng)});
            if (k % 3 == 2) spec.segments.push_back(Blink{40});
        }
        const auto s = generate(spec).samples;
        const DetectorParams p{};
        const StreamConfig c{spec.rate_hz, {}};
        const auto fx = detect_batch(s, p, c);
        const auto w = oracle::idt_windows(s, p.threshold_px(c.geometry), oracle::min_samples_for(p.min_duration_ms, spec.rate_hz));
        ASSERT_EQ(fx.size(), w.size());
        for (std::size_t k = 0; k < w.size(); ++k) {
            EXPECT_EQ(fx[k].start_ms, s[w[k].first].t_ms);
            EXPECT_EQ(fx[k].n_samples, static_cast<std::int64_t>(w[k].last - w[k].first + 1));
            EXPECT_LE(fx[k].dispersion_px, p.threshold_px(c.geometry));
            EXPECT_GE(fx[k].duration_ms, p.min_duration_ms);
        }
    }
}

TEST(FixationProperties, DisjointOrderedAndDeterministic) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> px(0, 1280), step(-15, 15);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<GazeSample> s;
        Point p{px(rng), px(rng)};
        for (int i = 0; i < 400; ++i) {
            if (i % 37 == 0) p = {px(rng), px(rng)};
            s.push_back({i * 1000.0 / 60, p.x + step(rng), p.y + step(rng), 3.0, i % 53 != 0});
        }
        const auto a = run_stream(s, {}, k60);
        const auto b = run_stream(s, {}, k60);
        ASSERT_EQ(a.events.size(), b.events.size());
        for (std::size_t k = 0; k < a.events.size(); ++k) {
            EXPECT_EQ(a.events[k].kind, b.events[k].kind);
            EXPECT_EQ(a.events[k].fixation, b.events[k].fixation);
        }
        for (std::size_t k = 1; k < a.fixations.size(); ++k) EXPECT_LT(a.fixations[k - 1].end_ms, a.fixations[k].start_ms);
        for (const auto& f : a.fixations) ASSERT_TRUE(f.mean_pupil_mm.has_value());
    }
}

TEST(FixationProperties, EventOrderPerFixation) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> px(0, 1280), jitter(-6, 6);
    std::vector<GazeSample> s;
    Point p{100, 100};
    for (int i = 0; i < 5000; ++i) {
        if (i % 19 == 0) p = {px(rng), px(rng)};
        s.push_back({i * 1000.0 / 60, p.x + jitter(rng), p.y + jitter(rng), std::nullopt, i % 101 != 0});
    }
    const auto r = run_stream(s, {1.0, 100.0, 4}, k60);
    std::map<std::uint64_t, std::vector<FixEventKind>> per;
    for (const auto& e : r.events) per[e.fixation_id].push_back(e.kind);
    for (const auto& [id, kinds] : per) {
        ASSERT_EQ(kinds.front(), FixEventKind::Provisional) << id;
        if (kinds.size() == 1) continue;  // retracted
        EXPECT_EQ(kinds[1], FixEventKind::Start);
        for (std::size_t k = 2; k + 1 < kinds.size(); ++k) EXPECT_EQ(kinds[k], FixEventKind::Update);
        EXPECT_EQ(kinds.back(), FixEventKind::End);
    }
}

TEST(FixationProperties, ShortMinimumEmitsProvisionalBeforeStart) {
    // min duration reached with a single sample: Provisional and Start arrive together
    FixationDetector det({1.0, 10.0, 4}, k60);
    const auto ev = det.push_sample({0, 1, 1, std::nullopt, true});
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_EQ(ev[0].kind, FixEventKind::Provisional);
    EXPECT_EQ(ev[1].kind, FixEventKind::Start);
}
