#include "dqlab/rational.hpp"

#include "dqlab/errors.hpp"

#include <cctype>

namespace dqlab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kMalformedInterval: return "malformed-interval";
        case ErrorKind::kUndefinedDensity: return "undefined-density";
        case ErrorKind::kEmptyInput: return "empty-input";
        case ErrorKind::kCannotSample: return "cannot-sample";
        case ErrorKind::kOutsideDomain: return "outside-domain";
        case ErrorKind::kAmbiguousDerivative: return "ambiguous-derivative";
        case ErrorKind::kDiagonalExcluded: return "diagonal-excluded";
        case ErrorKind::kSplitRequired: return "split-required";
        case ErrorKind::kDegenerateMap: return "degenerate-map";
        case ErrorKind::kInvalidParameter: return "invalid-parameter";
        case ErrorKind::kPreconditionViolation: return "precondition-violation";
        case ErrorKind::kSearchFailure: return "search-failure";
        case ErrorKind::kDensityTooLow: return "density-too-low";
        case ErrorKind::kThetaTooLarge: return "theta-too-large";
        case ErrorKind::kPairDegenerate: return "pair-degenerate";
        case ErrorKind::kSchema: return "schema";
        case ErrorKind::kIo: return "io";
    }
    return "unknown";
}

Rat::Rat(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorKind::kInvalidParameter, "zero denominator");
    q_ = mpq_class(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    q_.canonicalize();
}

Rat::Rat(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw Error(ErrorKind::kInvalidParameter, "zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rat Rat::parse(std::string_view text) {
    auto is_int = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? "1" : text.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den.front() == '-' || den.front() == '+')
        throw Error(ErrorKind::kSchema, "not a rational: '" + std::string(text) + "'");
    std::string n(num);
    if (n.front() == '+') n.erase(0, 1);
    mpz_class d{std::string(den)};
    if (d == 0) throw Error(ErrorKind::kSchema, "zero denominator: '" + std::string(text) + "'");
    return Rat(mpz_class(n), d);
}

Rat Rat::pow2(long e) {
    mpz_class p = 1;
    if (e >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        return Rat(p);
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    return Rat(mpz_class(1), p);
}

Rat& Rat::operator/=(const Rat& o) {
    if (o.is_zero()) throw Error(ErrorKind::kInvalidParameter, "division by zero");
    q_ /= o.q_;
    return *this;
}

}  // namespace dqlab
