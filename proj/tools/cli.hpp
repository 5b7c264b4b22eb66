// gazeflow command-line front end. Kept in a header so tests can drive
// run() in-process with string streams.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gazeflow/bench.hpp"
#include "gazeflow/gazeflow.hpp"
#include "gazeflow/server.hpp"

namespace gazeflow::cli {

inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "d_mm,px_per_mm,w,h"
inline ScreenGeometry parse_geometry(const std::string& text) {
    ScreenGeometry g;
    std::stringstream ss(text);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("geometry must be d_mm,px_per_mm,width,height; got '" + text + "'");
        }
    }
    if (v.size() != 4) throw UsageError("geometry must be d_mm,px_per_mm,width,height; got '" + text + "'");
    g = {v[0], v[1], v[2], v[3]};
    try {
        g.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    return g;
}

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

/// Opens `path` or uses the standard input for "-".
class Input {
public:
    Input(const std::string& path, std::istream& stdin_stream) {
        if (path.empty() || path == "-") {
            stream_ = &stdin_stream;
        } else {
            file_ = std::make_unique<std::ifstream>(path);
            if (!*file_) throw InvalidArgument("cannot open '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::istream& get() { return *stream_; }

private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* stream_ = nullptr;
};

inline Trace load_trace(const std::string& path, std::istream& in) {
    Input input(path, in);
    return read_trace(input.get());
}

struct DetectorOptions {
    double rate_hz = 60.0;
    std::string geometry;
    double dispersion_deg = 1.0;
    double min_ms = 100.0;
    int provisional_n = 4;

    void add(CLI::App* app) {
        app->add_option("--rate", rate_hz, "Sampling rate in Hz (60 or 240 for the reference tracker)")
            ->capture_default_str();
        app->add_option("--geometry", geometry,
                        "Viewing geometry d_mm,px_per_mm,width,height (default: $GAZE_GEOMETRY or "
                        "600,3.7795,1280,1024)");
        app->add_option("--dispersion-deg", dispersion_deg,
                        "I-DT dispersion bound in degrees (x-extent + y-extent); twice the 0.5 deg tracker accuracy")
            ->capture_default_str();
        app->add_option("--min-ms", min_ms, "Minimum fixation duration in ms")->capture_default_str();
        app->add_option("--provisional-n", provisional_n,
                        "Samples before a provisional fixation start (4 samples ~ 70 ms at 60 Hz)")
            ->capture_default_str();
    }

    ScreenGeometry screen() const {
        if (!geometry.empty()) return parse_geometry(geometry);
        if (const char* env = std::getenv("GAZE_GEOMETRY"); env && *env) return parse_geometry(env);
        return {};
    }

    StreamConfig stream() const { return {rate_hz, screen()}; }
    DetectorParams params() const { return {dispersion_deg, min_ms, provisional_n}; }
};

enum class Format { Tsv, Ndjson };

inline void add_format(CLI::App* app, Format& f) {
    app->add_option("--format", f, "Output format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"tsv", Format::Tsv}, {"ndjson", Format::Ndjson}}))
        ->capture_default_str();
}

inline void write_record(std::ostream& out, const TraceRecord& r, Format f) {
    if (f == Format::Tsv)
        out << serialize_record(r);
    else
        out << record_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

inline int cmd_detect(const DetectorOptions& o, const std::string& path, Format fmt, Streams io) {
    const auto trace = load_trace(path, io.in);
    FixationDetector det(o.params(), o.stream());
    for (const auto& s : gaze_samples(trace))
        for (const auto& e : det.push_sample(s))
            if (e.kind == FixEventKind::End) write_record(io.out, fix_record(e.fixation, e.t_ms), fmt);
    for (const auto& e : det.flush()) write_record(io.out, fix_record(e.fixation, e.t_ms), fmt);
    return kOk;
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

inline double parse_speed(const std::string& s) {
    if (s == "inf" || s == "max") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("--speed must be a positive number or 'inf'");
}

inline int cmd_replay(const DetectorOptions& o, const std::string& path, const std::string& speed, bool derive,
                      Format fmt, Streams io) {
    const auto trace = load_trace(path, io.in);
    ReplayOptions opts;
    opts.speed_factor = parse_speed(speed);
    if (derive) opts.derive_fixations = std::make_pair(o.params(), o.stream());
    replay(std::span<const TraceRecord>(trace), opts, [&](const TraceRecord& r) {
        write_record(io.out, r, fmt);
        io.out.flush();
    });
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

inline int cmd_simulate(const std::string& scenario_path, const std::string& out_path, Streams io) {
    Input input(scenario_path, io.in);
    const auto spec = parse_scenario(input.get());
    const auto stream = generate(spec);
    std::ofstream file;
    std::ostream* out = &io.out;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file) throw InvalidArgument("cannot write '" + out_path + "'");
        out = &file;
    }
    for (const auto& s : stream.samples) *out << serialize_record(gaze_record(s));
    return kOk;
}

// ---------------------------------------------------------------------------
// resolve / stats
// ---------------------------------------------------------------------------

inline std::vector<Fixation> trace_fixations(const Trace& trace, const DetectorOptions& o) {
    auto fixations = fix_records(trace);
    if (fixations.empty()) fixations = detect_batch(gaze_samples(trace), o.params(), o.stream());
    return fixations;
}

inline std::vector<InterestZone> load_zones(const Trace& trace, const std::string& zones_path, std::istream& in) {
    auto zones = zones_path.empty() ? zone_records(trace) : zone_records(load_trace(zones_path, in));
    if (zones.empty()) throw InvalidArgument("no ZONE records found");
    return zones;
}

struct ResolveOptions {
    std::string trace_path;
    std::string zones_path;
    std::vector<double> utterance;
    std::string segment;
    int deictics = 1;
    ResolverWeights weights;
};

inline int cmd_resolve(const DetectorOptions& o, const ResolveOptions& r, Streams io) {
    if (r.segment.empty() && r.utterance.size() != 2) throw UsageError("give --utterance START,END or --segment LABEL");
    const auto trace = load_trace(r.trace_path, io.in);
    const auto zones = load_zones(trace, r.zones_path, io.in);
    UtteranceInterval u;
    u.deictic_count = r.deictics;
    if (!r.segment.empty()) {
        const auto segs = segments(trace);
        const auto it = std::find_if(segs.begin(), segs.end(), [&](const Segment& s) { return s.label == r.segment; });
        if (it == segs.end()) throw InvalidArgument("no SEG record labelled '" + r.segment + "'");
        u.start_ms = static_cast<double>(it->start_ms);
        u.end_ms = static_cast<double>(it->end_ms);
    } else {
        u.start_ms = r.utterance[0];
        u.end_ms = r.utterance[1];
    }
    const auto fixations = trace_fixations(trace, o);
    const auto ranking = rank_referents(u, fixations, zones, r.weights);
    int rank = 0;
    for (const auto& s : ranking) {
        nlohmann::json j{{"type", "referent"},     {"rank", ++rank},
                         {"zone", s.zone_id},      {"score", s.score},
                         {"pre_ms", s.breakdown.pre_ms}, {"during_ms", s.breakdown.during_ms},
                         {"post_ms", s.breakdown.post_ms}};
        io.out << j.dump() << '\n';
    }
    nlohmann::json a{{"type", "assignment"}, {"zones", assign_deictics(u, fixations, zones, r.weights)}};
    io.out << a.dump() << '\n';
    return kOk;
}

inline int cmd_stats(const DetectorOptions& o, const std::string& trace_path, const std::string& zones_path,
                     Streams io) {
    const auto trace = load_trace(trace_path, io.in);
    const auto zones = load_zones(trace, zones_path, io.in);
    const auto fixations = trace_fixations(trace, o);
    const auto stats = zone_stats(std::span<const Fixation>(fixations), zones);
    const double t = trace.empty() ? 0.0 : static_cast<double>(trace.back().t_ms);
    io.out << wire::zone_stats(t, stats).dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

inline int cmd_bench(const ScreenGeometry& g, std::size_t n_saccades, std::uint64_t seed, Streams io) {
    auto& out = io.out;
    out << std::fixed << std::setprecision(2);

    out << "# provisional fixation latency (lens anchoring)\n";
    out << "rate_hz\tprovisional_n\tnominal_ms\tmeasured_ms\n";
    for (double rate : {60.0, 240.0})
        for (int n : {2, 3, 4, 6, 8})
            out << rate << '\t' << n << '\t' << samples_to_ms(n, rate) << '\t'
                << bench::measured_provisional_ms(rate, n, g) << '\n';

    out << "\n# dwell thresholds (counts rescaled from 60 Hz)\n";
    out << "rate_hz\tn_arm\tn_commit\tn_commit_total\tarmed_ms\tcommitted_ms\n";
    for (double rate : {60.0, 240.0}) {
        const auto p = DwellParams{}.at_rate(rate);
        out << rate << '\t' << p.n_arm << '\t' << p.commit_count() << '\t' << p.n_commit_total << '\t'
            << samples_to_ms(p.n_arm, rate) << '\t' << samples_to_ms(p.commit_count(), rate) << '\n';
    }

    out << "\n# landing prediction over " << n_saccades << " saccades of 2-20 deg\n";
    out << "rate_hz\tone_per_saccade\tmedian_err_pct\tmax_err_pct\tmean_lead_ms\tmin_lead_ms\n";
    std::vector<std::pair<double, bench::LandingSummary>> summaries;
    for (double rate : {60.0, 240.0}) {
        std::vector<bench::LandingOutcome> outcomes;
        for (const auto& c : bench::saccade_suite(n_saccades, rate, seed, g))
            outcomes.push_back(bench::run_landing_case(c, {}, g));
        const auto s = bench::summarize(outcomes);
        summaries.emplace_back(rate, s);
        out << rate << '\t' << s.exactly_one << '/' << s.saccades << '\t' << 100.0 * s.median_error << '\t'
            << 100.0 * s.max_error << '\t' << s.mean_lead_ms << '\t' << s.min_lead_ms << '\n';
    }

    out << "\n# lens placement relative to fixation onset (negative = before landing)\n";
    out << "rate_hz\tanchor_only_ms\twith_prediction_ms\n";
    const int n_anchor = LensParams{}.n_anchor;
    for (const auto& [rate, s] : summaries)
        out << rate << '\t' << samples_to_ms(n_anchor, rate) << '\t' << -s.mean_lead_ms << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// serve
// ---------------------------------------------------------------------------

struct ServeOptions {
    int port = -1;
    int http_port = -1;
    int arm = 10, commit_extra = 12, commit_total = 22;
    int button_arm = 10, button_commit_extra = 12;
    double pan_step = 32.0;
    double lens_deg = 5.0;
    double lens_ramp_deg = 0.0;
    int n_anchor = 4;
    double onset_deg_s = 100.0;
    bool no_preposition = false;
};

inline PipelineConfig pipeline_config(const DetectorOptions& o, const ServeOptions& s) {
    PipelineConfig c;
    c.stream = o.stream();
    c.detector = o.params();
    c.overview_dwell = {s.arm, s.commit_extra, s.commit_total, false};
    c.button_dwell = {s.button_arm, s.button_commit_extra, s.button_arm + s.button_commit_extra, true};
    c.lens.n_anchor = s.n_anchor;
    c.lens.theta_deg = s.lens_deg;
    if (s.lens_ramp_deg > 0) c.lens.falloff = SmoothFalloff{s.lens_ramp_deg};
    c.predictor.onset_deg_s = s.onset_deg_s;
    c.map.pan_step_px = s.pan_step;
    c.preposition_lens = !s.no_preposition;
    c.detector.validate();
    c.overview_dwell.validate();
    c.button_dwell.validate();
    c.lens.validate();
    return c;
}

inline int cmd_serve(const PipelineConfig& cfg, const ServeOptions& s, Streams io) {
    if (s.port < 0 && s.http_port < 0) {
        serve_stream(cfg, io.in, io.out);
        return kOk;
    }
    std::unique_ptr<TcpServer> tcp;
    std::unique_ptr<HttpBridge> http;
    std::vector<std::thread> threads;
    if (s.port >= 0) {
        tcp = std::make_unique<TcpServer>(cfg);
        const int p = tcp->listen(s.port);
        io.err << "gazeflow: NDJSON over TCP on 127.0.0.1:" << p << std::endl;
        threads.emplace_back([&] { tcp->run(); });
    }
    if (s.http_port >= 0) {
        http = std::make_unique<HttpBridge>(cfg);
        const int p = http->bind(s.http_port);
        io.err << "gazeflow: HTTP bridge on http://127.0.0.1:" << p << "/session/<id>" << std::endl;
        threads.emplace_back([&] { http->run(); });
    }
    for (auto& t : threads) t.join();
    return kOk;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"gazeflow: real-time gaze interaction engine"};
    app.require_subcommand(1);
    Streams io{in, out, err};

    DetectorOptions det;
    std::string path;
    Format fmt = Format::Tsv;

    auto* detect = app.add_subcommand("detect", "Detect fixations in a .gtr trace and print FIX records");
    det.add(detect);
    add_format(detect, fmt);
    detect->add_option("trace", path, "Input trace ('-' for stdin)")->capture_default_str();

    std::string speed = "1";
    bool derive = false;
    auto* rep = app.add_subcommand("replay", "Re-emit a trace with its original timing");
    det.add(rep);
    add_format(rep, fmt);
    rep->add_option("trace", path, "Input trace ('-' for stdin)");
    rep->add_option("--speed", speed, "Speed factor (2 = twice as fast, 'inf' = no waiting)")->capture_default_str();
    rep->add_flag("--derive-fixations", derive, "Inject FIX records computed from the GAZE records");

    std::string scenario, out_path;
    auto* sim = app.add_subcommand("simulate", "Generate a .gtr trace from an NDJSON scenario");
    sim->add_option("scenario", scenario, "Scenario document ('-' for stdin)");
    sim->add_option("-o,--output", out_path, "Output .gtr (default stdout)");

    ResolveOptions res;
    auto* resolve = app.add_subcommand("resolve", "Rank interest zones as referents of a spoken command");
    det.add(resolve);
    resolve->add_option("trace", res.trace_path, "Trace with FIX or GAZE records")->required();
    resolve->add_option("--zones", res.zones_path, "Trace holding ZONE records (default: the input trace)");
    resolve->add_option("--utterance", res.utterance, "Utterance interval START,END in ms")->delimiter(',')->expected(2);
    resolve->add_option("--segment", res.segment, "Use the SEG record with this label as the utterance");
    resolve->add_option("--deictics", res.deictics, "Number of deictic phrases")->capture_default_str();
    resolve->add_option("--w-pre", res.weights.w_pre, "Weight of fixation time before speaking")->capture_default_str();
    resolve->add_option("--w-during", res.weights.w_during, "Weight while speaking")->capture_default_str();
    resolve->add_option("--w-post", res.weights.w_post, "Weight after speaking")->capture_default_str();
    resolve->add_option("--pre-window", res.weights.pre_window_ms, "Pre-utterance window in ms")->capture_default_str();
    resolve->add_option("--post-window", res.weights.post_window_ms, "Post-utterance window in ms")->capture_default_str();

    std::string zones_path;
    auto* stats = app.add_subcommand("stats", "Per-zone fixation statistics");
    det.add(stats);
    stats->add_option("trace", path, "Trace with FIX or GAZE records")->required();
    stats->add_option("--zones", zones_path, "Trace holding ZONE records (default: the input trace)");

    std::size_t n_saccades = 200;
    std::uint64_t seed = 2024;
    auto* bench = app.add_subcommand("bench", "Latency and landing-error tables for 60 and 240 Hz");
    bench->add_option("--geometry", det.geometry, "Viewing geometry d_mm,px_per_mm,width,height");
    bench->add_option("--saccades", n_saccades, "Synthetic saccades per rate")->capture_default_str();
    bench->add_option("--seed", seed, "Suite seed")->capture_default_str();

    ServeOptions srv;
    auto* serve = app.add_subcommand("serve", "Run the live pipeline (stdio by default)");
    det.add(serve);
    serve->add_option("--port", srv.port, "Listen for NDJSON over TCP on 127.0.0.1:PORT (0 = any)");
    serve->add_option("--http-port", srv.http_port, "Serve the browser HTTP bridge on 127.0.0.1:PORT (0 = any)");
    serve->add_option("--arm-samples", srv.arm, "Overview dwell: samples before the warning (~170 ms at 60 Hz)")
        ->capture_default_str();
    serve->add_option("--commit-extra", srv.commit_extra,
                      "Overview dwell: further samples before the view changes (~200 ms at 60 Hz)")
        ->capture_default_str();
    serve->add_option("--commit-total", srv.commit_total, "Overview dwell: samples averaged for the new focus")
        ->capture_default_str();
    serve->add_option("--button-arm", srv.button_arm, "Button dwell: samples before the warning")->capture_default_str();
    serve->add_option("--button-commit-extra", srv.button_commit_extra, "Button dwell: further samples before acting")
        ->capture_default_str();
    serve->add_option("--pan-step", srv.pan_step, "Pan step in overview pixels")->capture_default_str();
    serve->add_option("--lens-deg", srv.lens_deg, "Lens diameter in degrees (5 = foveal, 10 = parafoveal)")
        ->capture_default_str();
    serve->add_option("--lens-ramp-deg", srv.lens_ramp_deg, "Smooth falloff width in degrees (0 = step)")
        ->capture_default_str();
    serve->add_option("--n-anchor", srv.n_anchor, "Samples averaged for the lens centre (~70 ms at 60 Hz)")
        ->capture_default_str();
    serve->add_option("--onset-deg-s", srv.onset_deg_s, "Saccade onset speed threshold")->capture_default_str();
    serve->add_flag("--no-preposition", srv.no_preposition, "Do not move the lens to predicted landing points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, r;
        const int code = app.exit(e, o, r);
        out << o.str();
        err << r.str();
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*detect) return cmd_detect(det, path, fmt, io);
        if (*rep) return cmd_replay(det, path, speed, derive, fmt, io);
        if (*sim) return cmd_simulate(scenario, out_path, io);
        if (*resolve) return cmd_resolve(det, res, io);
        if (*stats) return cmd_stats(det, path, zones_path, io);
        if (*bench) return cmd_bench(det.screen(), n_saccades, seed, io);
        if (*serve) {
            if (srv.n_anchor != det.provisional_n && serve->count("--provisional-n") == 0)
                det.provisional_n = std::max(2, srv.n_anchor);
            return cmd_serve(pipeline_config(det, srv), srv, io);
        }
    } catch (const UsageError& e) {
        err << "gazeflow: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "gazeflow: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}

}  // namespace gazeflow::cli
