#pragma once

#include <cstdint>

namespace svct {

// Counter-based uniform generator (splitmix64 finalizer applied to
// key + counter * golden gamma). Any draw is a pure function of
// (key, counter), so streams can be split per replication and per
// coordinate and results are bit-identical no matter how the work is
// scheduled across threads.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Key for an independent substream, e.g. one Monte Carlo replication.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                   (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    }

    std::uint64_t at(std::uint64_t counter) const {
        return mix(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform draw strictly inside (0,1): 53 mantissa bits, offset by half an ulp.
    double unit_at(std::uint64_t counter) const {
        return (static_cast<double>(at(counter) >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Sequential interface for consumers that do not need random access.
    std::uint64_t next_u64() { return at(ctr_++); }
    double next_unit() { return unit_at(ctr_++); }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

} // namespace svct
