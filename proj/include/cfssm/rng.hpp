#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cfssm {

/// One reproducible random stream. The generator core is std::mt19937_64
/// (bit-specified by the standard) and all floating-point draws are built
/// from explicit integer arithmetic, so a given seed yields the same
/// sequence on every platform. Box-Muller consumes exactly two uniforms
/// per normal draw; nothing is cached between calls.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1): 53-bit mantissa, offset by
    /// half an ulp so 0 and 1 are never returned.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static constexpr double two_pi = 6.283185307179586476925286766559;
    std::mt19937_64 engine_;
};

/// Purpose tag of a substream. `data` drives truth generation, `init` the
/// initial particle cloud, `belief` the committed filter recursion,
/// `score` the per-structure candidate evaluations, and `mix` the
/// mode-mixing resamples inside the IMM baseline. Keeping `score`/`mix`
/// apart from `belief` means candidate scoring never perturbs the
/// committed filter's draw sequence.
enum class StreamPurpose : std::uint64_t {
    data = 1,
    init = 2,
    belief = 3,
    score = 4,
    mix = 5,
};

/// Factory of named substreams keyed by (purpose, run index, structure id).
/// Equal keys under equal master seeds give identical streams; distinct
/// keys give statistically independent ones.
class RngStreams {
public:
    explicit RngStreams(std::uint64_t master_seed) : master_(master_seed) {}

    std::uint64_t master_seed() const { return master_; }

    RngStream stream(StreamPurpose purpose, std::uint64_t run,
                     std::uint64_t structure_id = 0) const {
        std::uint64_t s = master_;
        s = mix64(s + golden * (static_cast<std::uint64_t>(purpose) + 1));
        s = mix64(s + golden * (run + 1));
        s = mix64(s + golden * (structure_id + 1));
        return RngStream(s);
    }

private:
    static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

    // splitmix64 finalizer
    static std::uint64_t mix64(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t master_;
};

}  // namespace cfssm
