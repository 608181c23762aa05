#pragma once

#include "dqlab/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dqlab {

/// Closed interval [lo, hi].
struct Interval {
    Rat lo;
    Rat hi;

    Rat length() const { return hi - lo; }
    Rat midpoint() const { return (lo + hi) / 2; }
    bool contains(const Rat& x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Canonical finite union of closed intervals, optionally punctured at
/// finitely many points.
///
/// Invariants: intervals sorted by lo, non-degenerate, separated by strictly
/// positive gaps. Punctures are sorted, distinct, and each lies in some
/// interval. The represented set is (union of intervals) minus punctures.
/// Punctures never affect measure.
class IntervalSet {
public:
    IntervalSet() = default;

    /// Canonicalizes arbitrary closed intervals. Throws kMalformedInterval
    /// (with the offending index) when some lo > hi.
    static IntervalSet normalize(std::span<const Interval> raw);
    static IntervalSet normalize(std::initializer_list<Interval> raw) {
        return normalize(std::span<const Interval>(raw.begin(), raw.size()));
    }
    static IntervalSet of(const Interval& i) { return normalize({i}); }

    const std::vector<Interval>& intervals() const { return intervals_; }
    const std::vector<Rat>& punctures() const { return punctures_; }

    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }

    /// Membership in the represented (punctured) set.
    bool contains(const Rat& x) const;
    /// Membership in the closure (ignores punctures).
    bool closure_contains(const Rat& x) const;

    /// Smallest interval containing the set. Throws kEmptyInput when empty.
    Interval hull() const;

    /// The set split at its punctures into maximal pieces. Adjacent pieces
    /// share the puncture as an endpoint; the puncture itself is excluded
    /// from the set.
    std::vector<Interval> pieces() const;

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    friend IntervalSet with_punctures(IntervalSet base, std::vector<Rat> candidates);
    std::vector<Interval> intervals_;
    std::vector<Rat> punctures_;
};

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet difference(const IntervalSet& a, const IntervalSet& b);
IntervalSet complement_in(const IntervalSet& a, const Interval& universe);

/// Exact Lebesgue measure.
Rat measure(const IntervalSet& s);

/// Delta(F, G) = measure(F n G) / measure(G). Throws kUndefinedDensity when
/// measure(G) = 0.
Rat density(const IntervalSet& f, const IntervalSet& g);

struct DensityProfile {
    Rat point;
    std::vector<Rat> radii;
    std::vector<Rat> densities;
};

/// Densities of `f` in the windows [x - r, x + r] clipped to [0, 1].
DensityProfile density_profile(const IntervalSet& f, const Rat& x, std::span<const Rat> radii);
/// Same, with windows clipped to `universe` instead of [0, 1].
DensityProfile density_profile(const IntervalSet& f, const Rat& x, std::span<const Rat> radii,
                               const Interval& universe);

/// Radii 2^-first, ..., 2^-last.
std::vector<Rat> dyadic_radii(int first, int last);

/// Smith-Volterra-Cantor set at finite depth: step j removes the open middle
/// interval of length 4^-j from each of the 2^(j-1) surviving intervals.
IntervalSet fat_cantor(int depth);

/// n reproducible points of `s`, pushed through the interval ledger from a
/// 64-bit dyadic stream (mt19937_64 seeded with `seed`). Punctures are
/// skipped by redrawing.
std::vector<Rat> sample_points(const IntervalSet& s, std::size_t n, std::uint64_t seed);

/// Removes finitely many points. Points outside `s` are ignored; the measure
/// is unchanged.
IntervalSet minus_points(const IntervalSet& s, std::span<const Rat> pts);

/// Image of `s` under x -> scale * x + shift (scale != 0), punctures included.
IntervalSet affine_image(const IntervalSet& s, const Rat& scale, const Rat& shift);

}  // namespace dqlab
