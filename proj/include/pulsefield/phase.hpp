// Normalized phases on the unit circle and complex field values.
#pragma once

#include <cmath>
#include <compare>
#include <numbers>
#include <optional>

namespace pulsefield {

/// Reduces any real to [0, 1).
inline double wrap_unit(double v) noexcept {
    double r = v - std::floor(v);
    // floor can round r up to exactly 1.0 for tiny negative inputs
    return r >= 1.0 ? 0.0 : r;
}

/// Reduces any real to the signed offset range [-1/2, 1/2).
inline double wrap_signed(double v) noexcept {
    return wrap_unit(v + 0.5) - 0.5;
}

/// A fraction of one pulsing cycle, always kept in [0, 1).
class NormalizedPhase {
public:
    constexpr NormalizedPhase() noexcept = default;
    explicit NormalizedPhase(double v) noexcept : value_{wrap_unit(v)} {}

    [[nodiscard]] constexpr double value() const noexcept { return value_; }

    /// The same phase as a signed offset in [-1/2, 1/2).
    [[nodiscard]] double signed_offset() const noexcept { return wrap_signed(value_); }

    friend NormalizedPhase operator+(NormalizedPhase a, NormalizedPhase b) noexcept {
        return NormalizedPhase{a.value_ + b.value_};
    }
    friend NormalizedPhase operator-(NormalizedPhase a, NormalizedPhase b) noexcept {
        return NormalizedPhase{a.value_ - b.value_};
    }
    friend NormalizedPhase operator-(NormalizedPhase a) noexcept {
        return NormalizedPhase{-a.value_};
    }
    friend constexpr auto operator<=>(NormalizedPhase, NormalizedPhase) noexcept = default;

private:
    double value_{0.0};
};

/// Ring metric on [0,1): min{(a-b) mod 1, (b-a) mod 1}.
inline double ring_distance(NormalizedPhase a, NormalizedPhase b) noexcept {
    const double d = wrap_unit(a.value() - b.value());
    return d > 0.5 ? 1.0 - d : d;
}

inline double ring_distance(double a, double b) noexcept {
    return ring_distance(NormalizedPhase{a}, NormalizedPhase{b});
}

/// A complex number read as strength r(z) and normalized angle psi(z).
struct FieldValue {
    double re{0.0};
    double im{0.0};

    [[nodiscard]] double strength() const noexcept { return std::hypot(re, im); }

    /// Angle in cycles; empty when the strength is zero.
    [[nodiscard]] std::optional<NormalizedPhase> angle() const noexcept {
        if (re == 0.0 && im == 0.0) {
            return std::nullopt;
        }
        return NormalizedPhase{std::atan2(im, re) / (2.0 * std::numbers::pi)};
    }

    FieldValue& operator+=(FieldValue o) noexcept {
        re += o.re;
        im += o.im;
        return *this;
    }
    FieldValue& operator-=(FieldValue o) noexcept {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend FieldValue operator+(FieldValue a, FieldValue b) noexcept { return a += b; }
    friend FieldValue operator-(FieldValue a, FieldValue b) noexcept { return a -= b; }
    friend FieldValue operator*(FieldValue a, FieldValue b) noexcept {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend FieldValue operator*(double s, FieldValue a) noexcept { return {s * a.re, s * a.im}; }
    friend bool operator==(FieldValue, FieldValue) noexcept = default;
};

/// e^{2 pi j p}
inline FieldValue phase_to_unit(NormalizedPhase p) noexcept {
    const double a = 2.0 * std::numbers::pi * p.value();
    return {std::cos(a), std::sin(a)};
}

/// e^{2 pi j x} for an unnormalized cycle count x.
inline FieldValue cycles_to_unit(double x) noexcept {
    return phase_to_unit(NormalizedPhase{x});
}

/// Rotates z by the phase p.
inline FieldValue rotate(FieldValue z, NormalizedPhase p) noexcept {
    return phase_to_unit(p) * z;
}

}  // namespace pulsefield
