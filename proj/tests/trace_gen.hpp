// Random .gtr records for round-trip tests. Floats are drawn on the 0.001 grid.
#pragma once

#include <random>
#include <string>

#include "gazeflow/trace.hpp"

namespace tracegen {

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    gazeflow::TraceRecord next(std::int64_t t_ms) {
        using namespace gazeflow;
        TraceRecord r;
        r.t_ms = t_ms;
        switch (pick(0, 7)) {
            case 0: r.payload = GazeRecord{grid(), grid(), maybe(), pick(0, 4) != 0}; break;
            case 1: r.payload = PointerRecord{grid(), grid()}; break;
            case 2: r.payload = EventRecord{pick(0, 1) ? EventSource::User : EventSource::System, text(), text()}; break;
            case 3: r.payload = FrameRecord{text()}; break;
            case 4: {
                Fixation f{grid(), grid(), grid(), grid(), pick(1, 500), grid(), grid(), maybe()};
                r.payload = FixRecord{f};
                break;
            }
            case 5: r.payload = ZoneRecord{{text(), {grid(), grid(), grid(), grid()}, text()}}; break;
            case 6: r.payload = SegRecord{{text(), pick(-5000, 5000), pick(0, 100000)}}; break;
            default: {
                OpaqueRecord o{"X" + std::to_string(pick(0, 99)), {}};
                const int n = static_cast<int>(pick(0, 4));
                for (int i = 0; i < n; ++i) o.fields.push_back(plain());
                r.payload = o;
            }
        }
        return r;
    }

private:
    std::int64_t pick(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    double grid() { return static_cast<double>(pick(-10'000'000, 10'000'000)) / 1000.0; }
    std::optional<double> maybe() {
        if (pick(0, 3) == 0) return std::nullopt;
        return static_cast<double>(pick(0, 9000)) / 1000.0;
    }
    std::string text() {
        static const std::string alphabet = "abcXYZ019 _-.\\\t\n\r#\"{}";
        std::string s;
        const auto n = pick(0, 12);
        for (std::int64_t i = 0; i < n; ++i) s.push_back(alphabet[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(alphabet.size()) - 1))]);
        return s;
    }
    // opaque fields are stored raw, so keep them tab and newline free
    std::string plain() {
        std::string s;
        const auto n = pick(0, 8);
        for (std::int64_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + pick(0, 25)));
        return s;
    }

    std::mt19937_64 rng_;
};

}  // namespace tracegen
