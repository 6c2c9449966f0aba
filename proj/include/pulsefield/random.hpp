// Seeded random streams. Every draw in the library goes through these so a
// (config, seed) pair reproduces a run on any platform.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pulsefield {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of keys into one 64-bit value; order matters.
inline constexpr std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto k : keys) {
        h = splitmix64(h ^ splitmix64(k));
    }
    return h;
}

/// Maps 64 random bits to [0, 1) using the top 53 bits.
inline constexpr double bits_to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless uniform draw in [0, 1) keyed by its arguments.
inline constexpr double keyed_uniform(std::initializer_list<std::uint64_t> keys) noexcept {
    return bits_to_unit(mix_keys(keys));
}

/// A deterministic random stream. std::uniform_real_distribution is avoided
/// since its output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_{splitmix64(seed)} {}

    /// Independent child stream, e.g. one per node or per trial.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        return Rng{mix_keys({seed, stream_id})};
    }

    std::uint64_t next() { return engine_(); }
    double uniform() { return bits_to_unit(engine_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool coin() { return (engine_() >> 63) != 0; }

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= limit) {
                return r % bound;
            }
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pulsefield
