// Time-stamped multimodal trace (.gtr): one tab-separated record per line.
//
//   <t_ms>\tGAZE\t<x>\t<y>\t<pupil|->\t<valid 0/1>
//   <t_ms>\tPOINTER\t<x>\t<y>
//   <t_ms>\tEVENT\t<system|user>\t<name>\t<detail>
//   <t_ms>\tFRAME\t<reference id>
//   <t_ms>\tFIX\t<start>\t<end>\t<cx>\t<cy>\t<n>\t<dispersion>\t<duration>\t<pupil|->
//   <t_ms>\tZONE\t<id>\t<x>\t<y>\t<w>\t<h>\t<label>
//   <t_ms>\tSEG\t<label>\t<start_ms>\t<end_ms>
//
// t_ms and SEG bounds are integers; floating fields carry exactly three
// decimals, so values on the 0.001 grid round-trip bit-exactly. Text fields
// escape backslash, tab, CR and LF. Unknown kinds are kept verbatim.
#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazeflow/core.hpp"
#include "gazeflow/deictic.hpp"
#include "gazeflow/fixation.hpp"

namespace gazeflow {

struct ParseError : std::runtime_error {
    ParseError(std::size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
    std::size_t line;
};

struct GazeRecord {
    double x = 0, y = 0;
    std::optional<double> pupil;
    bool valid = true;
    friend bool operator==(const GazeRecord&, const GazeRecord&) = default;
};
struct PointerRecord {
    double x = 0, y = 0;
    friend bool operator==(const PointerRecord&, const PointerRecord&) = default;
};
enum class EventSource { System, User };
struct EventRecord {
    EventSource source = EventSource::System;
    std::string name;
    std::string detail;
    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};
struct FrameRecord {
    std::string ref;  // externally stored screen capture
    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};
struct FixRecord {
    Fixation fixation;
    friend bool operator==(const FixRecord&, const FixRecord&) = default;
};
struct ZoneRecord {
    InterestZone zone;
    friend bool operator==(const ZoneRecord&, const ZoneRecord&) = default;
};
struct Segment {
    std::string label;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    friend bool operator==(const Segment&, const Segment&) = default;
};
struct SegRecord {
    Segment segment;
    friend bool operator==(const SegRecord&, const SegRecord&) = default;
};
/// Forward compatibility: a kind this version does not know, fields kept raw.
struct OpaqueRecord {
    std::string kind;
    std::vector<std::string> fields;
    friend bool operator==(const OpaqueRecord&, const OpaqueRecord&) = default;
};

using RecordPayload = std::variant<GazeRecord, PointerRecord, EventRecord, FrameRecord, FixRecord,
                                   ZoneRecord, SegRecord, OpaqueRecord>;

struct TraceRecord {
    std::int64_t t_ms = 0;
    RecordPayload payload;

    std::string_view kind() const;

    template <class T>
    const T* as() const { return std::get_if<T>(&payload); }

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

// ---------------------------------------------------------------------------
// Field encoding
// ---------------------------------------------------------------------------

namespace detail {

inline void put_fixed3(std::string& out, double v) {
    char buf[64];
    if (v == 0.0) v = 0.0;  // no "-0.000"
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    if (ec != std::errc{}) throw InvalidArgument("cannot format value");
    std::string_view sv(buf, static_cast<std::size_t>(end - buf));
    if (sv == "-0.000") sv = "0.000";
    out.append(sv);
}

inline void put_opt3(std::string& out, const std::optional<double>& v) {
    if (v) put_fixed3(out, *v);
    else out.push_back('-');
}

inline void put_text(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
}

inline std::string get_text(std::string_view s, std::size_t line) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i == s.size()) throw ParseError(line, "dangling escape");
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: throw ParseError(line, std::string("unknown escape \\") + s[i]);
        }
    }
    return out;
}

inline double get_double(std::string_view s, std::size_t line, const char* what) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

inline std::optional<double> get_opt(std::string_view s, std::size_t line, const char* what) {
    if (s == "-") return std::nullopt;
    return get_double(s, line, what);
}

inline std::int64_t get_int(std::string_view s, std::size_t line, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

inline bool get_bool(std::string_view s, std::size_t line, const char* what) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

inline void tab(std::string& out) { out.push_back('\t'); }

}  // namespace detail

inline std::string_view TraceRecord::kind() const {
    struct V {
        std::string_view operator()(const GazeRecord&) const { return "GAZE"; }
        std::string_view operator()(const PointerRecord&) const { return "POINTER"; }
        std::string_view operator()(const EventRecord&) const { return "EVENT"; }
        std::string_view operator()(const FrameRecord&) const { return "FRAME"; }
        std::string_view operator()(const FixRecord&) const { return "FIX"; }
        std::string_view operator()(const ZoneRecord&) const { return "ZONE"; }
        std::string_view operator()(const SegRecord&) const { return "SEG"; }
        std::string_view operator()(const OpaqueRecord& o) const { return o.kind; }
    };
    return std::visit(V{}, payload);
}

/// One line, LF-terminated.
inline std::string serialize_record(const TraceRecord& r) {
    using namespace detail;
    std::string out = std::to_string(r.t_ms);
    tab(out);
    out.append(r.kind());
    struct V {
        std::string& out;
        void operator()(const GazeRecord& g) const {
            tab(out), put_fixed3(out, g.x), tab(out), put_fixed3(out, g.y);
            tab(out), put_opt3(out, g.pupil), tab(out), out.push_back(g.valid ? '1' : '0');
        }
        void operator()(const PointerRecord& p) const {
            tab(out), put_fixed3(out, p.x), tab(out), put_fixed3(out, p.y);
        }
        void operator()(const EventRecord& e) const {
            tab(out), out += e.source == EventSource::User ? "user" : "system";
            tab(out), put_text(out, e.name), tab(out), put_text(out, e.detail);
        }
        void operator()(const FrameRecord& f) const { tab(out), put_text(out, f.ref); }
        void operator()(const FixRecord& fr) const {
            const auto& f = fr.fixation;
            tab(out), put_fixed3(out, f.start_ms), tab(out), put_fixed3(out, f.end_ms);
            tab(out), put_fixed3(out, f.centroid_x_px), tab(out), put_fixed3(out, f.centroid_y_px);
            tab(out), out += std::to_string(f.n_samples);
            tab(out), put_fixed3(out, f.dispersion_px), tab(out), put_fixed3(out, f.duration_ms);
            tab(out), put_opt3(out, f.mean_pupil_mm);
        }
        void operator()(const ZoneRecord& zr) const {
            const auto& z = zr.zone;
            tab(out), put_text(out, z.zone_id);
            tab(out), put_fixed3(out, z.rect_px.x), tab(out), put_fixed3(out, z.rect_px.y);
            tab(out), put_fixed3(out, z.rect_px.width), tab(out), put_fixed3(out, z.rect_px.height);
            tab(out), put_text(out, z.label);
        }
        void operator()(const SegRecord& sr) const {
            tab(out), put_text(out, sr.segment.label);
            tab(out), out += std::to_string(sr.segment.start_ms);
            tab(out), out += std::to_string(sr.segment.end_ms);
        }
        void operator()(const OpaqueRecord& o) const {
            for (const auto& f : o.fields) tab(out), out += f;
        }
    };
    std::visit(V{out}, r.payload);
    out.push_back('\n');
    return out;
}

/// Inverse of serialize_record. Accepts the line with or without its LF.
inline TraceRecord parse_record(std::string_view line, std::size_t line_no = 0) {
    using namespace detail;
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto f = split_tabs(line);
    if (f.size() < 2) throw ParseError(line_no, "expected <t_ms>\\t<KIND>");
    TraceRecord r;
    r.t_ms = get_int(f[0], line_no, "timestamp");
    const std::string_view kind = f[1];
    auto arity = [&](std::size_t n) {
        if (f.size() != n + 2)
            throw ParseError(line_no, std::string(kind) + " expects " + std::to_string(n) + " fields, got " +
                                          std::to_string(f.size() - 2));
    };
    if (kind == "GAZE") {
        arity(4);
        r.payload = GazeRecord{get_double(f[2], line_no, "x"), get_double(f[3], line_no, "y"),
                               get_opt(f[4], line_no, "pupil"), get_bool(f[5], line_no, "valid flag")};
    } else if (kind == "POINTER") {
        arity(2);
        r.payload = PointerRecord{get_double(f[2], line_no, "x"), get_double(f[3], line_no, "y")};
    } else if (kind == "EVENT") {
        arity(3);
        EventRecord e;
        if (f[2] == "user") e.source = EventSource::User;
        else if (f[2] == "system") e.source = EventSource::System;
        else throw ParseError(line_no, "event source must be 'system' or 'user'");
        e.name = get_text(f[3], line_no);
        e.detail = get_text(f[4], line_no);
        r.payload = std::move(e);
    } else if (kind == "FRAME") {
        arity(1);
        r.payload = FrameRecord{get_text(f[2], line_no)};
    } else if (kind == "FIX") {
        arity(8);
        Fixation x;
        x.start_ms = get_double(f[2], line_no, "start");
        x.end_ms = get_double(f[3], line_no, "end");
        x.centroid_x_px = get_double(f[4], line_no, "centroid x");
        x.centroid_y_px = get_double(f[5], line_no, "centroid y");
        x.n_samples = get_int(f[6], line_no, "sample count");
        x.dispersion_px = get_double(f[7], line_no, "dispersion");
        x.duration_ms = get_double(f[8], line_no, "duration");
        x.mean_pupil_mm = get_opt(f[9], line_no, "pupil");
        r.payload = FixRecord{x};
    } else if (kind == "ZONE") {
        arity(6);
        InterestZone z;
        z.zone_id = get_text(f[2], line_no);
        z.rect_px = {get_double(f[3], line_no, "x"), get_double(f[4], line_no, "y"),
                     get_double(f[5], line_no, "width"), get_double(f[6], line_no, "height")};
        z.label = get_text(f[7], line_no);
        r.payload = ZoneRecord{z};
    } else if (kind == "SEG") {
        arity(3);
        r.payload = SegRecord{{get_text(f[2], line_no), get_int(f[3], line_no, "segment start"),
                               get_int(f[4], line_no, "segment end")}};
    } else {
        if (kind.empty()) throw ParseError(line_no, "empty record kind");
        OpaqueRecord o{std::string(kind), {}};
        for (std::size_t i = 2; i < f.size(); ++i) o.fields.emplace_back(f[i]);
        r.payload = std::move(o);
    }
    return r;
}

/// Reads a whole trace. Blank lines and lines starting with '#' are skipped.
inline Trace read_trace(std::istream& in) {
    Trace out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(parse_record(line, n));
    }
    return out;
}

inline void write_trace(std::ostream& out, std::span<const TraceRecord> trace) {
    for (const auto& r : trace) out << serialize_record(r);
}

struct TraceViolation {
    std::size_t index;
    std::string message;
};

/// Structural checks that parsing does not enforce: ordering, zone ids, segments.
inline std::vector<TraceViolation> validate(std::span<const TraceRecord> trace) {
    std::vector<TraceViolation> out;
    std::map<std::string, std::size_t> zone_ids;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i > 0 && trace[i].t_ms < trace[i - 1].t_ms)
            out.push_back({i, "timestamp " + std::to_string(trace[i].t_ms) + " precedes " +
                                  std::to_string(trace[i - 1].t_ms)});
        if (const auto* z = trace[i].as<ZoneRecord>()) {
            if (!zone_ids.emplace(z->zone.zone_id, i).second)
                out.push_back({i, "duplicate zone id '" + z->zone.zone_id + "'"});
            if (!(z->zone.rect_px.width > 0 && z->zone.rect_px.height > 0))
                out.push_back({i, "degenerate zone '" + z->zone.zone_id + "'"});
        }
        if (const auto* s = trace[i].as<SegRecord>(); s && s->segment.end_ms < s->segment.start_ms)
            out.push_back({i, "segment '" + s->segment.label + "' ends before it starts"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conversions between traces and domain objects
// ---------------------------------------------------------------------------

inline TraceRecord gaze_record(const GazeSample& s) {
    return {static_cast<std::int64_t>(std::llround(s.t_ms)), GazeRecord{s.x_px, s.y_px, s.pupil_mm, s.valid}};
}

inline std::vector<GazeSample> gaze_samples(std::span<const TraceRecord> trace) {
    std::vector<GazeSample> out;
    for (const auto& r : trace)
        if (const auto* g = r.as<GazeRecord>())
            out.push_back({static_cast<double>(r.t_ms), g->x, g->y, g->pupil, g->valid});
    return out;
}

inline std::vector<Fixation> fix_records(std::span<const TraceRecord> trace) {
    std::vector<Fixation> out;
    for (const auto& r : trace)
        if (const auto* f = r.as<FixRecord>()) out.push_back(f->fixation);
    return out;
}

inline std::vector<InterestZone> zone_records(std::span<const TraceRecord> trace) {
    std::vector<InterestZone> out;
    for (const auto& r : trace)
        if (const auto* z = r.as<ZoneRecord>()) out.push_back(z->zone);
    return out;
}

inline std::vector<Segment> segments(std::span<const TraceRecord> trace) {
    std::vector<Segment> out;
    for (const auto& r : trace)
        if (const auto* s = r.as<SegRecord>()) out.push_back(s->segment);
    return out;
}

/// FIX record stamped at the moment the fixation was closed.
inline TraceRecord fix_record(const Fixation& f, double closed_at_ms) {
    return {static_cast<std::int64_t>(std::llround(closed_at_ms)), FixRecord{f}};
}

// ---------------------------------------------------------------------------
// NDJSON export
// ---------------------------------------------------------------------------

inline nlohmann::json fixation_json(const Fixation& f) {
    nlohmann::json j{{"start_ms", f.start_ms},       {"end_ms", f.end_ms},
                     {"x", f.centroid_x_px},          {"y", f.centroid_y_px},
                     {"n", f.n_samples},              {"dispersion_px", f.dispersion_px},
                     {"duration_ms", f.duration_ms}};
    j["pupil"] = f.mean_pupil_mm ? nlohmann::json(*f.mean_pupil_mm) : nlohmann::json(nullptr);
    return j;
}

/// One JSON object per record; field names follow the TSV columns.
inline nlohmann::json record_json(const TraceRecord& r) {
    nlohmann::json j{{"t_ms", r.t_ms}, {"kind", std::string(r.kind())}};
    struct V {
        nlohmann::json& j;
        void operator()(const GazeRecord& g) const {
            j["x"] = g.x, j["y"] = g.y, j["valid"] = g.valid;
            j["pupil"] = g.pupil ? nlohmann::json(*g.pupil) : nlohmann::json(nullptr);
        }
        void operator()(const PointerRecord& p) const { j["x"] = p.x, j["y"] = p.y; }
        void operator()(const EventRecord& e) const {
            j["source"] = e.source == EventSource::User ? "user" : "system";
            j["name"] = e.name, j["detail"] = e.detail;
        }
        void operator()(const FrameRecord& f) const { j["ref"] = f.ref; }
        void operator()(const FixRecord& f) const { j.update(fixation_json(f.fixation)); }
        void operator()(const ZoneRecord& z) const {
            j["id"] = z.zone.zone_id, j["x"] = z.zone.rect_px.x, j["y"] = z.zone.rect_px.y;
            j["w"] = z.zone.rect_px.width, j["h"] = z.zone.rect_px.height, j["label"] = z.zone.label;
        }
        void operator()(const SegRecord& s) const {
            j["label"] = s.segment.label, j["start_ms"] = s.segment.start_ms, j["end_ms"] = s.segment.end_ms;
        }
        void operator()(const OpaqueRecord& o) const { j["fields"] = o.fields; }
    };
    std::visit(V{j}, r.payload);
    return j;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayOptions {
    /// Playback speed; infinity replays as fast as possible.
    double speed_factor = 1.0;
    /// When set, FIX records derived from the GAZE records are injected as
    /// the detector closes each fixation.
    std::optional<std::pair<DetectorParams, StreamConfig>> derive_fixations;
};

/// Delivers records in order on the calling thread, sleeping so that the
/// gap between consecutive deliveries is delta_t / speed_factor. The
/// callback must not block. Returns the number of records delivered.
template <class Sink>
std::size_t replay(std::span<const TraceRecord> trace, const ReplayOptions& opts, Sink&& sink) {
    if (!(opts.speed_factor > 0)) throw InvalidArgument("speed factor must be positive");
    const bool timed = std::isfinite(opts.speed_factor);
    std::optional<FixationDetector> detector;
    if (opts.derive_fixations) detector.emplace(opts.derive_fixations->first, opts.derive_fixations->second);

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const std::int64_t first_t = trace.empty() ? 0 : trace.front().t_ms;
    std::size_t delivered = 0;
    auto emit = [&](const TraceRecord& r) {
        sink(r);
        ++delivered;
    };
    for (const auto& r : trace) {
        if (timed) {
            const auto offset = std::chrono::duration<double, std::milli>(
                static_cast<double>(r.t_ms - first_t) / opts.speed_factor);
            std::this_thread::sleep_until(t0 + std::chrono::duration_cast<clock::duration>(offset));
        }
        emit(r);
        if (detector) {
            if (const auto* g = r.as<GazeRecord>()) {
                const GazeSample s{static_cast<double>(r.t_ms), g->x, g->y, g->pupil, g->valid};
                for (const auto& e : detector->push_sample(s))
                    if (e.kind == FixEventKind::End) emit(fix_record(e.fixation, e.t_ms));
            }
        }
    }
    if (detector)
        for (const auto& e : detector->flush()) emit(fix_record(e.fixation, e.t_ms));
    return delivered;
}

// ---------------------------------------------------------------------------
// Interest-zone statistics
// ---------------------------------------------------------------------------

struct ZoneStats {
    std::string zone_id;
    std::int64_t fixation_count = 0;
    double total_fixation_ms = 0.0;
    std::optional<double> mean_pupil_mm;  // mean over fixations that carry a pupil value

    friend bool operator==(const ZoneStats&, const ZoneStats&) = default;
};

/// Per-zone fixation counts and durations; a fixation counts in every zone
/// containing its centroid (borders included).
inline std::vector<ZoneStats> zone_stats(std::span<const Fixation> fixations, std::span<const InterestZone> zones) {
    if (zones.empty()) throw InvalidArgument("zone list is empty");
    std::vector<ZoneStats> out;
    for (const auto& z : zones) {
        ZoneStats st{z.zone_id, 0, 0.0, std::nullopt};
        double pupil_sum = 0;
        std::int64_t pupil_n = 0;
        for (const auto& f : fixations) {
            if (!z.contains(f.centroid())) continue;
            ++st.fixation_count;
            st.total_fixation_ms += f.duration_ms;
            if (f.mean_pupil_mm) {
                pupil_sum += *f.mean_pupil_mm;
                ++pupil_n;
            }
        }
        if (pupil_n > 0) st.mean_pupil_mm = pupil_sum / static_cast<double>(pupil_n);
        out.push_back(std::move(st));
    }
    return out;
}

/// Uses the trace's FIX records, or derives fixations from its GAZE records
/// when it has none and detector settings are given.
inline std::vector<ZoneStats> zone_stats(std::span<const TraceRecord> trace, std::span<const InterestZone> zones,
                                         const std::optional<std::pair<DetectorParams, StreamConfig>>& derive = {}) {
    auto fixations = fix_records(trace);
    if (fixations.empty() && derive) {
        const auto samples = gaze_samples(trace);
        fixations = detect_batch(samples, derive->first, derive->second);
    }
    return zone_stats(std::span<const Fixation>(fixations), zones);
}

}  // namespace gazeflow
