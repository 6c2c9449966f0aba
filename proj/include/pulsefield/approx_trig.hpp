// Integer-only trigonometry: sine/cosine on the 1-norm circle and an
// 8-facet zigzag two-argument arctangent. No floating point on this path.
//
// Phases are raw integers in [0, K) standing for raw/K cycles, K = 2^Bits.
// A point (x, y) plays (cos, sin) and lies on |x| + |y| = K.
//
// The arctangent folds each octant onto the zigzag m = min(|x|,|y|) / (|x|+|y|),
// which is 0 on the axes and 1/2 on the diagonals, and maps it linearly onto
// the octant's eighth of a cycle. The result is continuous, exact at the 8
// compass directions, and the exact inverse of l1_sincos.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>

namespace pulsefield {

template <int Bits = 16>
struct BasicFixedPhase {
    static_assert(Bits >= 3 && Bits <= 30, "scale must leave room for sums of many points");
    static constexpr std::int64_t K = std::int64_t{1} << Bits;

    std::int64_t raw{0};

    static constexpr BasicFixedPhase from_raw(std::int64_t r) noexcept { return {((r % K) + K) % K}; }

    /// Nearest representable phase to v cycles.
    static BasicFixedPhase from_cycles(double v) noexcept {
        return from_raw(static_cast<std::int64_t>(std::llround(v * static_cast<double>(K))));
    }

    [[nodiscard]] constexpr double cycles() const noexcept { return static_cast<double>(raw) / static_cast<double>(K); }

    friend constexpr bool operator==(BasicFixedPhase, BasicFixedPhase) noexcept = default;
};

using FixedPhase = BasicFixedPhase<>;

struct L1Point {
    std::int64_t x{0};
    std::int64_t y{0};
    friend constexpr bool operator==(L1Point, L1Point) noexcept = default;
};

/// Phase to the 1-norm circle of radius K, linear along each edge.
template <int Bits>
constexpr L1Point l1_sincos(BasicFixedPhase<Bits> p) noexcept {
    constexpr std::int64_t K = BasicFixedPhase<Bits>::K;
    constexpr std::int64_t Q = K / 4;
    const std::int64_t quarter = p.raw / Q;
    const std::int64_t t = (p.raw % Q) * 4;
    switch (quarter) {
        case 0: return {K - t, t};
        case 1: return {-t, K - t};
        case 2: return {-K + t, -t};
        default: return {t, -K + t};
    }
}

/// Unsigned zigzag arctangent in [0, K). (0, 0) throws.
template <int Bits = 16>
BasicFixedPhase<Bits> zigzag_atan2(std::int64_t y, std::int64_t x) {
    constexpr std::int64_t K = BasicFixedPhase<Bits>::K;
    constexpr std::int64_t Q = K / 4;
    constexpr std::int64_t E = K / 8;
    if (x == 0 && y == 0) {
        throw std::domain_error("zigzag_atan2: undefined at the origin");
    }
    const std::int64_t ax = std::llabs(x);
    const std::int64_t ay = std::llabs(y);
    const std::int64_t s = ax + ay;
    const std::int64_t minor = ax < ay ? ax : ay;
    // Facet height: Q * minor / s in [0, E], rounded to nearest.
    const std::int64_t h = (Q * minor * 2 + s) / (2 * s);

    // Octant index counter-clockwise from +x.
    int octant;
    if (y >= 0) {
        if (x > 0) octant = ay <= ax ? 0 : 1;
        else octant = ay > ax ? 2 : 3;
    } else {
        if (x < 0) octant = ay <= ax ? 4 : 5;
        else octant = ay > ax ? 6 : 7;
    }
    const std::int64_t base = octant * E;
    const std::int64_t raw = (octant % 2 == 0) ? base + h : base + E - h;
    return BasicFixedPhase<Bits>::from_raw(raw);
}

/// Largest angle error, in cycles, of zigzag_atan2<16> against atan2 over
/// every lattice point of the 1-norm circle of radius 2^16. Measured by an
/// exhaustive sweep; the trig tests re-run the sweep against this value.
inline constexpr double zigzag_max_error = 0.011325875400648444;

/// Signed form: offset from phase 1/2 in [-K/2, K/2). Zero when the angle is
/// 1/2 and anti-symmetric under y -> -y.
template <int Bits = 16>
std::int64_t zigzag_atan2_signed(std::int64_t y, std::int64_t x) {
    constexpr std::int64_t K = BasicFixedPhase<Bits>::K;
    const std::int64_t p = zigzag_atan2<Bits>(y, x).raw;
    return p - K / 2;
}

/// Inverse of the signed form back to [0, K).
template <int Bits = 16>
constexpr BasicFixedPhase<Bits> from_signed(std::int64_t s) noexcept {
    return BasicFixedPhase<Bits>::from_raw(s + BasicFixedPhase<Bits>::K / 2);
}

/// Ring distance in raw units, in [0, K/2].
template <int Bits>
constexpr std::int64_t fixed_ring_distance(BasicFixedPhase<Bits> a, BasicFixedPhase<Bits> b) noexcept {
    constexpr std::int64_t K = BasicFixedPhase<Bits>::K;
    const std::int64_t d = BasicFixedPhase<Bits>::from_raw(a.raw - b.raw).raw;
    return d > K / 2 ? K - d : d;
}

/// Integer mirror of a proposal about the field angle when they are more than
/// a quarter cycle apart.
template <int Bits>
constexpr BasicFixedPhase<Bits> fixed_mirror(BasicFixedPhase<Bits> proposal, BasicFixedPhase<Bits> field) noexcept {
    constexpr std::int64_t K = BasicFixedPhase<Bits>::K;
    if (fixed_ring_distance(field, proposal) <= K / 4) {
        return proposal;
    }
    return BasicFixedPhase<Bits>::from_raw(2 * field.raw + K / 2 - proposal.raw);
}

struct L1Sum {
    std::int64_t sx{0};
    std::int64_t sy{0};

    L1Sum& operator+=(L1Point p) noexcept {
        sx += p.x;
        sy += p.y;
        return *this;
    }
    L1Sum& operator-=(L1Point p) noexcept {
        sx -= p.x;
        sy -= p.y;
        return *this;
    }
    /// 1-norm of the sum in raw units; equals count*K for aligned points.
    [[nodiscard]] std::int64_t l1_norm() const noexcept { return std::llabs(sx) + std::llabs(sy); }
    [[nodiscard]] bool is_zero() const noexcept { return sx == 0 && sy == 0; }
    friend constexpr bool operator==(L1Sum, L1Sum) noexcept = default;
};

/// Integer phase of a receive tick seen from now, rounded to the nearest raw step.
template <int Bits = 16>
BasicFixedPhase<Bits> tick_phase(std::int64_t c, std::int64_t now, std::int64_t T, std::int64_t c_max) noexcept {
    constexpr std::int64_t K = BasicFixedPhase<Bits>::K;
    std::int64_t diff = (c - now) % c_max;
    if (diff < 0) diff += c_max;
    if (diff > c_max / 2) diff -= c_max;
    const std::int64_t rem = ((diff % T) + T) % T;
    return BasicFixedPhase<Bits>::from_raw((rem * K + T / 2) / T);
}

/// Integer-path anonymous DMF: componentwise sum of l1_sincos over records.
/// omega counts whole cycles and does not rotate the sum.
template <int Bits = 16>
L1Sum fixed_field_accumulate(std::span<const std::int64_t> ticks, std::int64_t now, std::int64_t T,
                             [[maybe_unused]] std::int64_t omega, std::int64_t c_max) noexcept {
    L1Sum s;
    for (auto c : ticks) {
        s += l1_sincos(tick_phase<Bits>(c, now, T, c_max));
    }
    return s;
}

}  // namespace pulsefield
