#pragma once

#include "dqlab/interval_set.hpp"
#include "dqlab/rational.hpp"

namespace dqlab {

/// A real number known to lie in [mid - rad, mid + rad]. Both ends are exact
/// rationals, so every comparison against an enclosure is rigorous.
struct Enclosure {
    Rat mid;
    Rat rad;  // >= 0

    static Enclosure exact(Rat v) { return {std::move(v), 0}; }
    /// Enclosure of the closed interval [lo, hi].
    static Enclosure hull(const Rat& lo, const Rat& hi) { return {(lo + hi) / 2, (hi - lo) / 2}; }

    Rat lo() const { return mid - rad; }
    Rat hi() const { return mid + rad; }
    bool is_exact() const { return rad.is_zero(); }
    bool contains(const Rat& x) const { return lo() <= x && x <= hi(); }
    bool overlaps(const Enclosure& o) const { return !(hi() < o.lo() || o.hi() < lo()); }

    /// +1 / -1 when the sign is certified, 0 otherwise (including exact zero).
    int certified_sign() const;
    /// Upper bound on |x|.
    Rat mag() const { return mid.abs() + rad; }
    /// Lower bound on |x|.
    Rat mig() const;

    Enclosure& operator+=(const Enclosure& o) { mid += o.mid; rad += o.rad; return *this; }
    Enclosure& operator-=(const Enclosure& o) { mid -= o.mid; rad += o.rad; return *this; }

    friend Enclosure operator+(Enclosure a, const Enclosure& b) { return a += b; }
    friend Enclosure operator-(Enclosure a, const Enclosure& b) { return a -= b; }
    friend Enclosure operator-(const Enclosure& a) { return {-a.mid, a.rad}; }
    friend Enclosure operator*(const Enclosure& a, const Enclosure& b);
    friend Enclosure operator*(const Enclosure& a, const Rat& k) { return {a.mid * k, a.rad * k.abs()}; }
    friend Enclosure operator*(const Rat& k, const Enclosure& a) { return a * k; }
    friend Enclosure operator/(const Enclosure& a, const Rat& k) { return {a.mid / k, a.rad / k.abs()}; }
    /// Throws kInvalidParameter when `b` may contain zero.
    friend Enclosure operator/(const Enclosure& a, const Enclosure& b);
    friend Enclosure operator+(Enclosure a, const Rat& k) { a.mid += k; return a; }
    friend Enclosure operator-(Enclosure a, const Rat& k) { a.mid -= k; return a; }
};

/// Intersection of two enclosures of the same real; both must overlap.
Enclosure meet(const Enclosure& a, const Enclosure& b);
/// Smallest enclosure containing both.
Enclosure join(const Enclosure& a, const Enclosure& b);

/// Rounds the midpoint to a dyadic with `bits` fractional bits, widening the
/// radius by the rounding error. Keeps long computations from growing huge
/// denominators.
Enclosure trim(const Enclosure& e, int bits);

/// pi to roughly `bits` bits.
Enclosure pi_enclosure(int bits);
/// sin(pi t) and cos(pi t) for rational t. Exact at multiples of 1/2.
Enclosure sinpi(const Rat& t, int bits);
Enclosure cospi(const Rat& t, int bits);
/// sin x and cos x for rational x (radians). Exact at x = 0.
Enclosure sin_rat(const Rat& x, int bits);
Enclosure cos_rat(const Rat& x, int bits);
/// Non-rigorous approximations used only to seed searches whose result is
/// then certified with enclosures.
Rat acospi_approx(const Rat& z, int bits);  // arccos(z) / pi, z clamped to [-1, 1]
Rat asinpi_approx(const Rat& z, int bits);  // arcsin(z) / pi, z clamped to [-1, 1]
Rat sqrt_approx(const Rat& z, int bits);

}  // namespace dqlab
