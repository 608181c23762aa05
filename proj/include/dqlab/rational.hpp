#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace dqlab {

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Thin value wrapper over GMP's mpq_class. The wrapper exists so that
/// expression templates never leak into `auto` declarations and so that
/// every construction path canonicalizes.
class Rat {
public:
    Rat() = default;
    Rat(int v) : q_(v) {}  // NOLINT: implicit on purpose, literals read naturally
    Rat(long v) : q_(v) {}  // NOLINT
    Rat(long long v) : q_(static_cast<long>(v)) {}  // NOLINT
    Rat(std::int64_t num, std::int64_t den);
    explicit Rat(const mpz_class& num) : q_(num) {}
    Rat(const mpz_class& num, const mpz_class& den);
    explicit Rat(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    /// Parses "p", "p/q" or "-p/q". Throws dqlab::Error(kSchema) on bad input.
    static Rat parse(std::string_view text);

    /// 2^e for any integer e.
    static Rat pow2(long e);

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    std::string str() const { return q_.get_str(); }
    double to_double() const { return q_.get_d(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sign() == 0; }
    Rat abs() const { return Rat(::abs(q_)); }

    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
    friend Rat operator-(const Rat& a) { return Rat(mpq_class(-a.q_)); }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    mpq_class q_;
};

inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

/// Rational upper bound for pi used by every closed-form slope bound.
inline Rat pi_upper() { return Rat(355, 113); }
/// Rational lower bound for pi.
inline Rat pi_lower() { return Rat(333, 106); }

}  // namespace dqlab
