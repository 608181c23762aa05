#pragma once

#include "dqlab/enclosure.hpp"
#include "dqlab/interval_set.hpp"
#include "dqlab/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dqlab {

inline constexpr int kDefaultPrecision = 96;

enum class CurveShape { kAffine, kSinHalf, kCosHalf, kCosFull };

const char* to_string(CurveShape s);
CurveShape parse_shape(const std::string& s);

/// One piece of a continuous piecewise function, in local coordinate
/// t = (x - lo) / w on [0, 1]:
///
///   value(t) = y_start + (y_end - y_start) t + height * psi(t)
///
/// with psi = 0 for AFFINE, psi(t) = (1 - cos(pi t)) / 2 - t for the half
/// arcs (sin on [-pi/2, pi/2] and cos on [0, pi] are the same curve once
/// their endpoints are pinned), and psi(t) = sin^2(pi t) for the full cos
/// arc on [-pi, pi]. psi vanishes at both ends, so y_start / y_end are the
/// exact endpoint values.
///
/// An axis-aligned copy of a half arc has height == y_end - y_start; a full
/// arc has y_start == y_end and overshoots by |height|. Any other height is
/// the same arc sheared by an added linear term, which is what affine
/// conjugation produces. For AFFINE pieces height always equals the chord.
struct Piece {
    Interval domain;
    Rat y_start;
    Rat y_end;
    CurveShape shape = CurveShape::kAffine;
    Rat height;

    static Piece affine(Rat lo, Rat hi, Rat y0, Rat y1);
    static Piece sin_half(Rat lo, Rat hi, Rat y0, Rat y1);
    static Piece cos_half(Rat lo, Rat hi, Rat y0, Rat y1);
    static Piece cos_full(Rat lo, Rat hi, Rat y, Rat overshoot);

    Rat width() const { return domain.hi - domain.lo; }
    Rat chord() const { return y_end - y_start; }
    bool is_half_arc() const { return shape == CurveShape::kSinHalf || shape == CurveShape::kCosHalf; }
    /// True when the piece is a straight segment (AFFINE, or an arc of zero height).
    bool is_linear() const { return shape == CurveShape::kAffine || height.is_zero(); }
    /// Exact one-sided slope at either endpoint (the arcs are tangent to
    /// their chord's shear there, so both ends share one value).
    Rat endpoint_slope() const;

    friend bool operator==(const Piece&, const Piece&) = default;
};

/// Exact rational upper bound on |f'| over the whole piece, from the closed
/// forms |H| pi / (2w) (half arcs) and |H| pi / w (full arc) plus the shear,
/// with pi replaced by 355/113.
Rat max_slope_upper(const Piece& p);

/// Continuous function on [A, B] built from consecutive pieces.
class PiecewiseFn {
public:
    PiecewiseFn() = default;
    /// Validates partition and continuity; throws kInvalidParameter.
    explicit PiecewiseFn(std::vector<Piece> pieces);

    const std::vector<Piece>& pieces() const { return pieces_; }
    Interval domain() const { return {pieces_.front().domain.lo, pieces_.back().domain.hi}; }

    /// Index of a piece whose domain contains x (the left one at joins).
    /// Throws kOutsideDomain.
    std::size_t locate(const Rat& x) const;

    friend bool operator==(const PiecewiseFn&, const PiecewiseFn&) = default;

private:
    std::vector<Piece> pieces_;
};

struct SlopeBounds {
    Rat lo;
    Rat hi;
};

Enclosure eval(const Piece& p, const Rat& x, int precision_bits = kDefaultPrecision);
Enclosure eval(const PiecewiseFn& f, const Rat& x, int precision_bits = kDefaultPrecision);
Enclosure deriv(const Piece& p, const Rat& x, int precision_bits = kDefaultPrecision);
/// Throws kAmbiguousDerivative at a join whose one-sided slopes differ.
Enclosure deriv(const PiecewiseFn& f, const Rat& x, int precision_bits = kDefaultPrecision);
/// Secant slope; throws kDiagonalExcluded when x1 == x2.
Enclosure dq(const PiecewiseFn& f, const Rat& x1, const Rat& x2,
             int precision_bits = kDefaultPrecision);

/// Rigorous range of p' over the sub-domain [u1, u2].
SlopeBounds derivative_range(const Piece& p, const Rat& u1, const Rat& u2,
                             int precision_bits = kDefaultPrecision);
/// Rigorous bounds on f' over region (positive-length overlaps with pieces).
/// Throws kEmptyInput when the region misses the domain.
SlopeBounds slope_bounds(const PiecewiseFn& f, const IntervalSet& region,
                         int precision_bits = kDefaultPrecision);

bool is_c1(const PiecewiseFn& f);

struct MeasureBounds {
    Rat lo;
    Rat hi;
};

/// Enclosure of the measure of f(s). Each piece overlap is cut into
/// certified-monotone runs (full arcs are cut at their apex); images of the
/// runs are unioned with inner and outer endpoint bounds, then combined with
/// the mean-value bounds min|f'| and max|f'| per piece. Throws
/// kSplitRequired when a run cannot be certified monotone.
MeasureBounds image_measure_bounds(const PiecewiseFn& f, const IntervalSet& s,
                                   int precision_bits = kDefaultPrecision);

struct Preimage {
    std::vector<Enclosure> points;  // isolated crossings, sorted
    IntervalSet plateaus;           // constant pieces at height y
};

Preimage preimage(const PiecewiseFn& f, const Rat& y, int precision_bits = kDefaultPrecision);

struct PropertyFlags {
    bool a = false;  // every level set of f' is null
    bool b = false;  // {f' = 0} is null
    bool c = false;  // f is not linear on any positive-mass set
    bool d = false;  // f is not constant on any positive-mass set
};

/// Decides the four properties on the piece class, optionally for f
/// restricted to `region`. A non-degenerate arc meets any line, and its
/// derivative meets any value, in finitely many points, so only linear
/// pieces can carry positive-measure level sets.
PropertyFlags classify_properties(const PiecewiseFn& f,
                                  const std::optional<IntervalSet>& region = std::nullopt);

/// g(u) = f(a u + b) + c u + d on the preimage of f's domain.
/// Throws kDegenerateMap when a == 0.
PiecewiseFn affine_conjugate(const PiecewiseFn& f, const Rat& a, const Rat& b, const Rat& c,
                             const Rat& d);

/// Working precision that keeps the error of values scaled by `magnitude`
/// under 2^-bits.
int working_bits(int bits, const Rat& magnitude);

}  // namespace dqlab
