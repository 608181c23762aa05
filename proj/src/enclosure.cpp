#include "dqlab/enclosure.hpp"

#include "dqlab/errors.hpp"

#include <mpfr.h>

namespace dqlab {

namespace {

// Extra working bits on top of the caller's target; every rounding bound
// below is stated relative to the target, the guard absorbs the constants.
constexpr int kGuard = 10;

class Mpfr {
public:
    explicit Mpfr(int bits) { mpfr_init2(v_, bits); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;

    mpfr_ptr get() { return v_; }
    Rat to_rat() const {
        mpq_class q;
        mpfr_get_q(q.get_mpq_t(), v_);
        return Rat(q);
    }

private:
    mpfr_t v_;
};

Rat clamp(const Rat& x, const Rat& lo, const Rat& hi) { return max(lo, min(x, hi)); }

}  // namespace

int Enclosure::certified_sign() const {
    if (lo().sign() > 0) return 1;
    if (hi().sign() < 0) return -1;
    return 0;
}

Rat Enclosure::mig() const {
    Rat m = mid.abs() - rad;
    return m.sign() > 0 ? m : Rat(0);
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
    return {a.mid * b.mid, a.mid.abs() * b.rad + b.mid.abs() * a.rad + a.rad * b.rad};
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) {
    if (b.certified_sign() == 0)
        throw Error(ErrorKind::kInvalidParameter, "enclosure division by a value that may be zero");
    if (b.is_exact()) return a / b.mid;
    Rat l = Rat(1) / b.hi(), h = Rat(1) / b.lo();
    if (h < l) std::swap(l, h);
    return a * Enclosure::hull(l, h);
}

Enclosure meet(const Enclosure& a, const Enclosure& b) {
    Rat lo = max(a.lo(), b.lo()), hi = min(a.hi(), b.hi());
    if (hi < lo) throw Error(ErrorKind::kInvalidParameter, "disjoint enclosures of one value");
    return Enclosure::hull(lo, hi);
}

Enclosure join(const Enclosure& a, const Enclosure& b) {
    return Enclosure::hull(min(a.lo(), b.lo()), max(a.hi(), b.hi()));
}

Enclosure trim(const Enclosure& e, int bits) {
    mpz_class scaled = e.mid.num();
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), e.mid.den().get_mpz_t());
    Rat rounded = Rat(q) * Rat::pow2(-bits);
    return {rounded, e.rad + (e.mid - rounded).abs()};
}

Enclosure pi_enclosure(int bits) {
    Mpfr p(bits + kGuard);
    mpfr_const_pi(p.get(), MPFR_RNDN);
    return {p.to_rat(), Rat::pow2(-bits)};
}

Enclosure sinpi(const Rat& t_in, int bits) {
    // Exact reduction to t in [0, 1/2] with a sign.
    mpz_class fl;
    mpz_class two_den = t_in.den() * 2;
    mpz_fdiv_q(fl.get_mpz_t(), t_in.num().get_mpz_t(), two_den.get_mpz_t());
    Rat t = t_in - Rat(fl) * 2;
    int sign = 1;
    if (t >= 1) {
        t -= 1;
        sign = -1;
    }
    if (t > Rat(1, 2)) t = Rat(1) - t;
    if (t.is_zero()) return Enclosure::exact(0);
    if (t == Rat(1, 2)) return Enclosure::exact(sign);
    if (t == Rat(1, 6)) return Enclosure::exact(Rat(sign, 2));

    const int wp = bits + kGuard;
    Mpfr x(wp), tm(wp), s(wp);
    mpfr_const_pi(x.get(), MPFR_RNDN);
    mpfr_set_q(tm.get(), t.raw().get_mpq_t(), MPFR_RNDN);
    mpfr_mul(x.get(), x.get(), tm.get(), MPFR_RNDN);
    mpfr_sin(s.get(), x.get(), MPFR_RNDN);
    // pi, t and the product each carry relative error <= 2^-wp, the argument
    // is < 2, sin is 1-Lipschitz: total error well under 2^-bits.
    Enclosure e{s.to_rat(), Rat::pow2(-bits)};
    Rat lo = clamp(e.lo(), 0, 1), hi = clamp(e.hi(), 0, 1);
    e = Enclosure::hull(lo, hi);
    return sign > 0 ? e : -e;
}

Enclosure cospi(const Rat& t, int bits) { return sinpi(t + Rat(1, 2), bits); }

Enclosure sin_rat(const Rat& x, int bits) {
    if (x.is_zero()) return Enclosure::exact(0);
    const int wp = bits + kGuard;
    Mpfr xm(wp), s(wp);
    mpfr_set_q(xm.get(), x.raw().get_mpq_t(), MPFR_RNDN);
    Rat d = (x - xm.to_rat()).abs();
    mpfr_sin(s.get(), xm.get(), MPFR_RNDN);
    return {s.to_rat(), d + Rat::pow2(-wp)};
}

Enclosure cos_rat(const Rat& x, int bits) {
    if (x.is_zero()) return Enclosure::exact(1);
    const int wp = bits + kGuard;
    Mpfr xm(wp), c(wp);
    mpfr_set_q(xm.get(), x.raw().get_mpq_t(), MPFR_RNDN);
    Rat d = (x - xm.to_rat()).abs();
    mpfr_cos(c.get(), xm.get(), MPFR_RNDN);
    return {c.to_rat(), d + Rat::pow2(-wp)};
}

Rat acospi_approx(const Rat& z, int bits) {
    Rat zc = clamp(z, -1, 1);
    const int wp = bits + kGuard;
    Mpfr zm(wp), a(wp), p(wp);
    mpfr_set_q(zm.get(), zc.raw().get_mpq_t(), MPFR_RNDN);
    mpfr_acos(a.get(), zm.get(), MPFR_RNDN);
    mpfr_const_pi(p.get(), MPFR_RNDN);
    mpfr_div(a.get(), a.get(), p.get(), MPFR_RNDN);
    return a.to_rat();
}

Rat asinpi_approx(const Rat& z, int bits) {
    Rat zc = clamp(z, -1, 1);
    const int wp = bits + kGuard;
    Mpfr zm(wp), a(wp), p(wp);
    mpfr_set_q(zm.get(), zc.raw().get_mpq_t(), MPFR_RNDN);
    mpfr_asin(a.get(), zm.get(), MPFR_RNDN);
    mpfr_const_pi(p.get(), MPFR_RNDN);
    mpfr_div(a.get(), a.get(), p.get(), MPFR_RNDN);
    return a.to_rat();
}

Rat sqrt_approx(const Rat& z, int bits) {
    const int wp = bits + kGuard;
    Mpfr zm(wp);
    mpfr_set_q(zm.get(), max(z, Rat(0)).raw().get_mpq_t(), MPFR_RNDN);
    mpfr_sqrt(zm.get(), zm.get(), MPFR_RNDN);
    return zm.to_rat();
}

}  // namespace dqlab
