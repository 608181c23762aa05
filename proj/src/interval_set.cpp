#include "dqlab/interval_set.hpp"

#include "dqlab/errors.hpp"

#include <algorithm>
#include <random>

namespace dqlab {

namespace {

// Merges sorted, possibly overlapping or adjacent closed intervals.
std::vector<Interval> merge_sorted(std::vector<Interval> v) {
    std::vector<Interval> out;
    out.reserve(v.size());
    for (auto& iv : v) {
        if (iv.lo == iv.hi) continue;
        if (!out.empty() && iv.lo <= out.back().hi) {
            if (out.back().hi < iv.hi) out.back().hi = std::move(iv.hi);
        } else {
            out.push_back(std::move(iv));
        }
    }
    return out;
}

std::vector<Interval> closure_intersect(const std::vector<Interval>& a,
                                        const std::vector<Interval>& b) {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const Rat& lo = max(a[i].lo, b[j].lo);
        const Rat& hi = min(a[i].hi, b[j].hi);
        if (lo < hi) out.push_back({lo, hi});
        if (a[i].hi < b[j].hi) ++i; else ++j;
    }
    return out;
}

std::vector<Interval> closure_complement(const std::vector<Interval>& a, const Interval& u) {
    std::vector<Interval> out;
    Rat cursor = u.lo;
    for (const auto& iv : a) {
        if (iv.hi <= cursor) continue;
        if (iv.lo >= u.hi) break;
        if (cursor < iv.lo) out.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < u.hi) out.push_back({cursor, u.hi});
    return out;
}

template <class Member>
std::vector<Rat> surviving_punctures(const IntervalSet& result, const IntervalSet& a,
                                     const IntervalSet& b, Member member) {
    std::vector<Rat> cand = a.punctures();
    cand.insert(cand.end(), b.punctures().begin(), b.punctures().end());
    std::vector<Rat> out;
    for (auto& p : cand)
        if (result.closure_contains(p) && !member(p)) out.push_back(std::move(p));
    return out;
}

}  // namespace

IntervalSet with_punctures(IntervalSet base, std::vector<Rat> candidates) {
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (auto& p : candidates)
        if (base.closure_contains(p)) base.punctures_.push_back(std::move(p));
    return base;
}

IntervalSet IntervalSet::normalize(std::span<const Interval> raw) {
    std::vector<Interval> v;
    v.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].hi < raw[i].lo)
            throw Error(ErrorKind::kMalformedInterval,
                        "interval #" + std::to_string(i) + " has lo > hi: [" + raw[i].lo.str() +
                            ", " + raw[i].hi.str() + "]");
        v.push_back(raw[i]);
    }
    std::sort(v.begin(), v.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    IntervalSet s;
    s.intervals_ = merge_sorted(std::move(v));
    return s;
}

bool IntervalSet::closure_contains(const Rat& x) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                               [](const Rat& v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    return x <= std::prev(it)->hi;
}

bool IntervalSet::contains(const Rat& x) const {
    return closure_contains(x) && !std::binary_search(punctures_.begin(), punctures_.end(), x);
}

Interval IntervalSet::hull() const {
    if (intervals_.empty()) throw Error(ErrorKind::kEmptyInput, "hull of empty set");
    return {intervals_.front().lo, intervals_.back().hi};
}

std::vector<Interval> IntervalSet::pieces() const {
    std::vector<Interval> out;
    auto p = punctures_.begin();
    for (const auto& iv : intervals_) {
        Rat start = iv.lo;
        while (p != punctures_.end() && *p <= iv.hi) {
            if (start < *p) out.push_back({start, *p});
            start = *p;
            ++p;
        }
        if (start < iv.hi) out.push_back({start, iv.hi});
    }
    return out;
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> all = a.intervals();
    all.insert(all.end(), b.intervals().begin(), b.intervals().end());
    IntervalSet r = IntervalSet::normalize(all);
    return with_punctures(r, surviving_punctures(r, a, b, [&](const Rat& p) {
                              return a.contains(p) || b.contains(p);
                          }));
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet r = IntervalSet::normalize(closure_intersect(a.intervals(), b.intervals()));
    return with_punctures(r, surviving_punctures(r, a, b, [&](const Rat& p) {
                              return a.contains(p) && b.contains(p);
                          }));
}

IntervalSet difference(const IntervalSet& a, const IntervalSet& b) {
    if (a.empty()) return {};
    IntervalSet r = IntervalSet::normalize(
        closure_intersect(a.intervals(), closure_complement(b.intervals(), a.hull())));
    return with_punctures(r, surviving_punctures(r, a, b, [&](const Rat& p) {
                              return a.contains(p) && !b.contains(p);
                          }));
}

IntervalSet complement_in(const IntervalSet& a, const Interval& universe) {
    // Punctures of `a` become isolated points of the complement; they are null
    // and dropped with the rest of the boundary.
    return IntervalSet::normalize(closure_complement(a.intervals(), universe));
}

Rat measure(const IntervalSet& s) {
    Rat total = 0;
    for (const auto& iv : s.intervals()) total += iv.length();
    return total;
}

Rat density(const IntervalSet& f, const IntervalSet& g) {
    Rat mg = measure(g);
    if (mg.is_zero()) throw Error(ErrorKind::kUndefinedDensity, "reference set has measure zero");
    return measure(intersect(f, g)) / mg;
}

DensityProfile density_profile(const IntervalSet& f, const Rat& x, std::span<const Rat> radii) {
    return density_profile(f, x, radii, Interval{0, 1});
}

DensityProfile density_profile(const IntervalSet& f, const Rat& x, std::span<const Rat> radii,
                               const Interval& universe) {
    if (radii.empty()) throw Error(ErrorKind::kEmptyInput, "density profile needs radii");
    DensityProfile p{x, {}, {}};
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i].sign() <= 0 || (i > 0 && !(radii[i] < radii[i - 1])))
            throw Error(ErrorKind::kInvalidParameter, "radii must be positive, strictly decreasing");
        Interval w{max(x - radii[i], universe.lo), min(x + radii[i], universe.hi)};
        if (!(w.lo < w.hi))
            throw Error(ErrorKind::kUndefinedDensity, "window outside universe at " + x.str());
        p.radii.push_back(radii[i]);
        p.densities.push_back(density(f, IntervalSet::of(w)));
    }
    return p;
}

std::vector<Rat> dyadic_radii(int first, int last) {
    std::vector<Rat> r;
    for (int j = first; j <= last; ++j) r.push_back(Rat::pow2(-j));
    return r;
}

IntervalSet fat_cantor(int depth) {
    if (depth < 0) throw Error(ErrorKind::kInvalidParameter, "fat_cantor depth must be >= 0");
    std::vector<Interval> cur{{0, 1}};
    for (int j = 1; j <= depth; ++j) {
        Rat half_gap = Rat::pow2(-2 * j) / 2;
        std::vector<Interval> next;
        next.reserve(cur.size() * 2);
        for (const auto& iv : cur) {
            Rat mid = iv.midpoint();
            next.push_back({iv.lo, mid - half_gap});
            next.push_back({mid + half_gap, iv.hi});
        }
        cur = std::move(next);
    }
    return IntervalSet::normalize(cur);
}

std::vector<Rat> sample_points(const IntervalSet& s, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorKind::kInvalidParameter, "sample count must be >= 1");
    const auto& iv = s.intervals();
    std::vector<Rat> cum;
    cum.reserve(iv.size());
    Rat total = 0;
    for (const auto& i : iv) {
        total += i.length();
        cum.push_back(total);
    }
    if (total.is_zero()) throw Error(ErrorKind::kCannotSample, "cannot sample a null set");

    std::mt19937_64 rng(seed);
    const Rat scale = total * Rat::pow2(-64);
    std::vector<Rat> out;
    out.reserve(n);
    while (out.size() < n) {
        Rat target = Rat(mpz_class(static_cast<unsigned long>(rng()))) * scale;
        auto k = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
        Rat start = k == 0 ? Rat(0) : cum[k - 1];
        Rat x = iv[k].lo + (target - start);
        if (s.contains(x)) out.push_back(std::move(x));
    }
    return out;
}

IntervalSet minus_points(const IntervalSet& s, std::span<const Rat> pts) {
    std::vector<Rat> cand = s.punctures();
    for (const auto& p : pts)
        if (s.closure_contains(p)) cand.push_back(p);
    IntervalSet base = IntervalSet::normalize(s.intervals());
    return with_punctures(std::move(base), std::move(cand));
}

IntervalSet affine_image(const IntervalSet& s, const Rat& scale, const Rat& shift) {
    if (scale.is_zero()) throw Error(ErrorKind::kDegenerateMap, "affine image with zero scale");
    std::vector<Interval> v;
    v.reserve(s.size());
    for (const auto& iv : s.intervals()) {
        Rat a = scale * iv.lo + shift, b = scale * iv.hi + shift;
        if (b < a) std::swap(a, b);
        v.push_back({a, b});
    }
    std::vector<Rat> p;
    for (const auto& x : s.punctures()) p.push_back(scale * x + shift);
    return with_punctures(IntervalSet::normalize(v), std::move(p));
}

}  // namespace dqlab
