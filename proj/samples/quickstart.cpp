// Detects fixations in a synthetic stream and prints the lens region each
// fixation produces.
#include <cstdio>

#include "gazeflow/gazeflow.hpp"

int main() {
    using namespace gazeflow;

    ScenarioSpec spec;
    spec.rate_hz = 60;
    spec.seed = 7;
    spec.start_px = {200, 200};
    spec.segments = {Fixate{{200, 200}, 400, 2.0}, Saccade{{700, 420}, 45, SpeedProfile::Triangular},
                     Fixate{{700, 420}, 500, 2.0}};
    const auto stream = generate(spec);

    const StreamConfig cfg{spec.rate_hz, ScreenGeometry{}};
    FixationDetector detector(DetectorParams{}, cfg);
    ContingentLens lens(LensParams{}, cfg.geometry);

    auto handle = [&](const FixEvent& e) {
        if (e.kind == FixEventKind::End)
            std::printf("fixation %llu: %.0f-%.0f ms at (%.1f, %.1f), %lld samples\n",
                        static_cast<unsigned long long>(e.fixation_id), e.fixation.start_ms, e.fixation.end_ms,
                        e.fixation.centroid_x_px, e.fixation.centroid_y_px,
                        static_cast<long long>(e.fixation.n_samples));
        if (const auto r = lens.on_fix_event(e))
            std::printf("  lens at (%.1f, %.1f) r=%.1f px, t=%.0f ms\n", r->center_px.x, r->center_px.y,
                        r->radius_px, e.t_ms);
    };
    for (const auto& s : stream.samples)
        for (const auto& e : detector.push_sample(s)) handle(e);
    for (const auto& e : detector.flush()) handle(e);
}
