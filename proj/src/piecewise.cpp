#include "dqlab/piecewise.hpp"

#include "dqlab/errors.hpp"

#include <algorithm>
#include <map>

namespace dqlab {

namespace {

Rat local_t(const Piece& p, const Rat& x) { return (x - p.domain.lo) / p.width(); }

long log2_upper(const Rat& r) {
    if (r.is_zero()) return 0;
    return static_cast<long>(mpz_sizeinbase(r.num().get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(r.den().get_mpz_t(), 2)) + 1;
}

// Product of the closed intervals [a0, a1] * [b0, b1].
SlopeBounds interval_mul(const Rat& a0, const Rat& a1, const Rat& b0, const Rat& b1) {
    Rat c[4] = {a0 * b0, a0 * b1, a1 * b0, a1 * b1};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Enclosure value_at_t(const Piece& p, const Rat& t, int bits) {
    Enclosure base = Enclosure::exact(p.y_start + p.chord() * t);
    if (p.is_linear()) return base;
    const int wb = working_bits(bits, p.height.abs() + 1);
    Enclosure psi;
    if (p.shape == CurveShape::kCosFull) {
        Enclosure s = sinpi(t, wb);
        psi = s * s;
    } else {
        psi = (Enclosure::exact(1) - cospi(t, wb)) / 2 - Enclosure::exact(t);
    }
    return base + psi * p.height;
}

// p' = alpha + beta * s with s = sin(pi t) (half arcs) or sin(2 pi t) (full arc).
struct DerivForm {
    Rat alpha;
    Enclosure beta;
};

DerivForm deriv_form(const Piece& p, int bits) {
    const Rat w = p.width();
    if (p.is_linear()) return {p.chord() / w, Enclosure::exact(0)};
    Enclosure pi = pi_enclosure(bits);
    if (p.shape == CurveShape::kCosFull) return {p.chord() / w, pi * (p.height / w)};
    return {(p.chord() - p.height) / w, pi * (p.height / (w * 2))};
}

Enclosure deriv_at_t(const Piece& p, const Rat& t, int bits) {
    if (p.is_linear()) return Enclosure::exact(p.chord() / p.width());
    const int wb = working_bits(bits, (p.height / p.width()).abs() * 8 + 1);
    DerivForm d = deriv_form(p, wb);
    Rat arg = p.shape == CurveShape::kCosFull ? t * 2 : t;
    return d.beta * sinpi(arg, wb) + d.alpha;
}

template <class Fn>
void for_each_overlap(const PiecewiseFn& f, const IntervalSet& region, Fn&& fn) {
    const auto& pieces = f.pieces();
    const auto& ivs = region.intervals();
    std::size_t i = 0, j = 0;
    while (i < pieces.size() && j < ivs.size()) {
        const Rat& lo = max(pieces[i].domain.lo, ivs[j].lo);
        const Rat& hi = min(pieces[i].domain.hi, ivs[j].hi);
        if (lo < hi) fn(i, lo, hi);
        if (pieces[i].domain.hi < ivs[j].hi) ++i; else ++j;
    }
}

struct Run {
    Rat t0;
    Rat t1;
    int direction;  // +1 increasing, -1 decreasing, 0 uncertified
};

// Splits [0, 1] of a non-linear piece into runs on which p is certified
// monotone. Unsheared arcs are known in closed form.
std::vector<Run> monotone_runs(const Piece& p, int bits) {
    std::vector<Run> out;
    const int up = p.height.sign();
    if (p.is_half_arc() && p.height == p.chord()) return {{Rat(0), Rat(1), up}};
    if (p.shape == CurveShape::kCosFull && p.chord().is_zero())
        return {{Rat(0), Rat(1, 2), up}, {Rat(1, 2), Rat(1), -up}};
    auto visit = [&](auto&& self, const Rat& a, const Rat& b, int depth) -> void {
        const Rat lo = p.domain.lo + a * p.width(), hi = p.domain.lo + b * p.width();
        SlopeBounds r = derivative_range(p, lo, hi, bits);
        if (r.lo.sign() >= 0 && r.hi.sign() > 0) { out.push_back({a, b, 1}); return; }
        if (r.hi.sign() <= 0 && r.lo.sign() < 0) { out.push_back({a, b, -1}); return; }
        if (depth >= 40) { out.push_back({a, b, 0}); return; }
        Rat m = (a + b) / 2;
        self(self, a, m, depth + 1);
        self(self, m, b, depth + 1);
    };
    visit(visit, Rat(0), Rat(1), 0);
    return out;
}

}  // namespace

const char* to_string(CurveShape s) {
    switch (s) {
        case CurveShape::kAffine: return "AFFINE";
        case CurveShape::kSinHalf: return "SIN_HALF";
        case CurveShape::kCosHalf: return "COS_HALF";
        case CurveShape::kCosFull: return "COS_FULL";
    }
    return "?";
}

CurveShape parse_shape(const std::string& s) {
    if (s == "AFFINE") return CurveShape::kAffine;
    if (s == "SIN_HALF") return CurveShape::kSinHalf;
    if (s == "COS_HALF") return CurveShape::kCosHalf;
    if (s == "COS_FULL") return CurveShape::kCosFull;
    throw Error(ErrorKind::kSchema, "unknown shape '" + s + "'");
}

int working_bits(int bits, const Rat& magnitude) {
    return bits + static_cast<int>(std::max(0L, log2_upper(magnitude))) + 6;
}

Piece Piece::affine(Rat lo, Rat hi, Rat y0, Rat y1) {
    Rat h = y1 - y0;
    return {{std::move(lo), std::move(hi)}, std::move(y0), std::move(y1), CurveShape::kAffine, h};
}

Piece Piece::sin_half(Rat lo, Rat hi, Rat y0, Rat y1) {
    Rat h = y1 - y0;
    return {{std::move(lo), std::move(hi)}, std::move(y0), std::move(y1), CurveShape::kSinHalf, h};
}

Piece Piece::cos_half(Rat lo, Rat hi, Rat y0, Rat y1) {
    Rat h = y1 - y0;
    return {{std::move(lo), std::move(hi)}, std::move(y0), std::move(y1), CurveShape::kCosHalf, h};
}

Piece Piece::cos_full(Rat lo, Rat hi, Rat y, Rat overshoot) {
    return {{std::move(lo), std::move(hi)}, y, y, CurveShape::kCosFull, std::move(overshoot)};
}

Rat Piece::endpoint_slope() const {
    if (is_linear() || shape == CurveShape::kCosFull) return chord() / width();
    return (chord() - height) / width();
}

Rat max_slope_upper(const Piece& p) {
    const Rat w = p.width();
    if (p.is_linear()) return p.chord().abs() / w;
    if (p.shape == CurveShape::kCosFull)
        return p.chord().abs() / w + p.height.abs() * pi_upper() / w;
    return (p.chord() - p.height).abs() / w + p.height.abs() * pi_upper() / (w * 2);
}

PiecewiseFn::PiecewiseFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw Error(ErrorKind::kInvalidParameter, "piecewise function needs a piece");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        const std::string at = "piece #" + std::to_string(i);
        if (!(p.domain.lo < p.domain.hi))
            throw Error(ErrorKind::kInvalidParameter, at + " has non-positive width");
        if (p.shape == CurveShape::kAffine && p.height != p.chord())
            throw Error(ErrorKind::kInvalidParameter, at + ": AFFINE height must equal the chord");
        if (i + 1 < pieces_.size()) {
            const Piece& q = pieces_[i + 1];
            if (p.domain.hi != q.domain.lo)
                throw Error(ErrorKind::kInvalidParameter, at + " does not abut its successor");
            if (p.y_end != q.y_start)
                throw Error(ErrorKind::kInvalidParameter, at + " is discontinuous with its successor");
        }
    }
}

std::size_t PiecewiseFn::locate(const Rat& x) const {
    if (x < pieces_.front().domain.lo || pieces_.back().domain.hi < x)
        throw Error(ErrorKind::kOutsideDomain, x.str() + " is outside the domain");
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                               [](const Piece& p, const Rat& v) { return p.domain.hi < v; });
    return static_cast<std::size_t>(it - pieces_.begin());
}

Enclosure eval(const Piece& p, const Rat& x, int precision_bits) {
    if (!p.domain.contains(x)) throw Error(ErrorKind::kOutsideDomain, x.str() + " is outside the piece");
    if (x == p.domain.lo) return Enclosure::exact(p.y_start);
    if (x == p.domain.hi) return Enclosure::exact(p.y_end);
    return value_at_t(p, local_t(p, x), precision_bits);
}

Enclosure eval(const PiecewiseFn& f, const Rat& x, int precision_bits) {
    return eval(f.pieces()[f.locate(x)], x, precision_bits);
}

Enclosure deriv(const Piece& p, const Rat& x, int precision_bits) {
    if (!p.domain.contains(x)) throw Error(ErrorKind::kOutsideDomain, x.str() + " is outside the piece");
    if (x == p.domain.lo || x == p.domain.hi) return Enclosure::exact(p.endpoint_slope());
    return deriv_at_t(p, local_t(p, x), precision_bits);
}

Enclosure deriv(const PiecewiseFn& f, const Rat& x, int precision_bits) {
    std::size_t i = f.locate(x);
    const auto& ps = f.pieces();
    if (x == ps[i].domain.hi && i + 1 < ps.size()) {
        Rat left = ps[i].endpoint_slope(), right = ps[i + 1].endpoint_slope();
        if (left != right)
            throw Error(ErrorKind::kAmbiguousDerivative,
                        "non-C1 join at " + x.str() + ": left slope " + left.str() +
                            ", right slope " + right.str());
        return Enclosure::exact(left);
    }
    return deriv(ps[i], x, precision_bits);
}

Enclosure dq(const PiecewiseFn& f, const Rat& x1, const Rat& x2, int precision_bits) {
    if (x1 == x2) throw Error(ErrorKind::kDiagonalExcluded, "difference quotient on the diagonal");
    Rat dx = x2 - x1;
    // Values must be accurate relative to |dx| for the quotient to meet the target.
    const int bits = precision_bits + static_cast<int>(std::max(0L, -log2_upper(dx.abs()))) + 2;
    return (eval(f, x2, bits) - eval(f, x1, bits)) / dx;
}

SlopeBounds derivative_range(const Piece& p, const Rat& u1, const Rat& u2, int precision_bits) {
    if (p.is_linear()) {
        Rat k = p.chord() / p.width();
        return {k, k};
    }
    const Rat t1 = local_t(p, u1), t2 = local_t(p, u2);
    const int wb = working_bits(precision_bits, (p.height / p.width()).abs() * 8 + 1);
    DerivForm d = deriv_form(p, wb);
    Rat slo, shi;
    if (p.shape == CurveShape::kCosFull) {
        Enclosure a = sinpi(t1 * 2, wb), b = sinpi(t2 * 2, wb);
        slo = min(a.lo(), b.lo());
        shi = max(a.hi(), b.hi());
        if (t1 <= Rat(1, 4) && Rat(1, 4) <= t2) shi = 1;
        if (t1 <= Rat(3, 4) && Rat(3, 4) <= t2) slo = -1;
    } else {
        Enclosure a = sinpi(t1, wb), b = sinpi(t2, wb);
        slo = min(a.lo(), b.lo());
        shi = max(a.hi(), b.hi());
        if (t1 <= Rat(1, 2) && Rat(1, 2) <= t2) shi = 1;
    }
    SlopeBounds r = interval_mul(d.beta.lo(), d.beta.hi(), slo, shi);
    return {r.lo + d.alpha, r.hi + d.alpha};
}

SlopeBounds slope_bounds(const PiecewiseFn& f, const IntervalSet& region, int precision_bits) {
    std::optional<SlopeBounds> acc;
    for_each_overlap(f, region, [&](std::size_t i, const Rat& lo, const Rat& hi) {
        SlopeBounds r = derivative_range(f.pieces()[i], lo, hi, precision_bits);
        if (!acc) acc = r;
        else acc = SlopeBounds{min(acc->lo, r.lo), max(acc->hi, r.hi)};
    });
    if (!acc) throw Error(ErrorKind::kEmptyInput, "slope bounds over a region that misses the domain");
    return *acc;
}

bool is_c1(const PiecewiseFn& f) {
    const auto& ps = f.pieces();
    for (std::size_t i = 0; i + 1 < ps.size(); ++i)
        if (ps[i].endpoint_slope() != ps[i + 1].endpoint_slope()) return false;
    return true;
}

MeasureBounds image_measure_bounds(const PiecewiseFn& f, const IntervalSet& s, int precision_bits) {
    std::vector<Interval> inner, outer;
    // (piece, direction) -> accumulated run measure and the smallest |f'| seen
    struct Group {
        Rat length = 0;
        std::optional<Rat> min_abs;
    };
    std::map<std::pair<std::size_t, int>, Group> groups;
    Rat mvt_upper = 0;

    for_each_overlap(f, s, [&](std::size_t i, const Rat& lo, const Rat& hi) {
        const Piece& p = f.pieces()[i];
        std::vector<Rat> cuts{lo};
        if (p.shape == CurveShape::kCosFull && !p.is_linear() && p.chord().is_zero()) {
            Rat apex = p.domain.midpoint();
            if (lo < apex && apex < hi) cuts.push_back(apex);
        }
        cuts.push_back(hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const Rat &u1 = cuts[k], &u2 = cuts[k + 1];
            SlopeBounds r = derivative_range(p, u1, u2, precision_bits);
            int dir;
            if (r.lo.sign() >= 0 && r.hi.sign() > 0) dir = 1;
            else if (r.hi.sign() <= 0 && r.lo.sign() < 0) dir = -1;
            else if (r.lo.is_zero() && r.hi.is_zero()) dir = 0;
            else
                throw Error(ErrorKind::kSplitRequired,
                            "piece #" + std::to_string(i) + " changes monotonicity inside [" +
                                u1.str() + ", " + u2.str() + "]");
            Rat max_abs = max(r.lo.abs(), r.hi.abs());
            mvt_upper += max_abs * (u2 - u1);
            if (dir == 0) continue;  // constant run: a single image point
            Rat min_abs = dir > 0 ? r.lo : -r.hi;
            Group& g = groups[{i, dir}];
            g.length += u2 - u1;
            g.min_abs = g.min_abs ? min(*g.min_abs, min_abs) : min_abs;

            Enclosure e1 = eval(p, u1, precision_bits), e2 = eval(p, u2, precision_bits);
            if (dir < 0) std::swap(e1, e2);
            if (e1.hi() < e2.lo()) inner.push_back({e1.hi(), e2.lo()});
            outer.push_back({min(e1.lo(), e2.lo()), max(e1.hi(), e2.hi())});
        }
    });

    Rat lo = measure(IntervalSet::normalize(inner));
    for (const auto& [key, g] : groups) lo = max(lo, *g.min_abs * g.length);
    Rat hi = min(measure(IntervalSet::normalize(outer)), mvt_upper);
    return {lo, hi};
}

namespace {

// Crossing of p(x) = y inside the run [t0, t1] (local coordinates), where
// p(t0) - y and p(t1) - y are certified of opposite sign. Returns an
// x-enclosure of width <= 2^-bits when the signs resolve.
Enclosure bisect_crossing(const Piece& p, Rat a, Rat b, const Rat& y, int dir, int bits,
                          const std::optional<Rat>& seed) {
    const Rat w = p.width();
    const int wb = bits + 40;
    auto side = [&](const Rat& t) { return (value_at_t(p, t, wb) - y).certified_sign() * dir; };
    const Rat target = Rat::pow2(-bits) / w;  // bracket width in t
    if (seed && a < *seed && *seed < b) {
        Rat d = target / 4;
        Rat l = max(a, *seed - d), h = min(b, *seed + d);
        if (side(l) < 0 && side(h) > 0) { a = l; b = h; }
    }
    while (b - a > target) {
        Rat m = (a + b) / 2;
        Enclosure v = value_at_t(p, m, wb) - y;
        if (v.is_exact() && v.mid.is_zero()) { a = m; b = m; break; }
        int sd = v.certified_sign() * dir;
        if (sd < 0) a = m;
        else if (sd > 0) b = m;
        else break;
    }
    return Enclosure::hull(p.domain.lo + a * w, p.domain.lo + b * w);
}

}  // namespace

Preimage preimage(const PiecewiseFn& f, const Rat& y, int precision_bits) {
    std::vector<Interval> plateaus;
    std::vector<Enclosure> points;
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
        const Piece& p = f.pieces()[i];
        if (p.is_linear()) {
            if (p.chord().is_zero()) {
                if (p.y_start == y) plateaus.push_back(p.domain);
                continue;
            }
            Rat lo = min(p.y_start, p.y_end), hi = max(p.y_start, p.y_end);
            if (lo <= y && y <= hi)
                points.push_back(Enclosure::exact(p.domain.lo + (y - p.y_start) / p.chord() * p.width()));
            continue;
        }
        // psi stays within [-1/2, 1/2] for half arcs and [0, 1] for the full arc
        const Rat reach = p.height.abs();
        if (y < min(p.y_start, p.y_end) - reach || max(p.y_start, p.y_end) + reach < y) continue;
        for (const Run& run : monotone_runs(p, precision_bits)) {
            Enclosure v0 = value_at_t(p, run.t0, precision_bits + 40);
            Enclosure v1 = value_at_t(p, run.t1, precision_bits + 40);
            if (run.direction == 0) {
                Rat slack = max_slope_upper(p) * (run.t1 - run.t0) * p.width();
                if (join(v0, v1).lo() - slack <= y && y <= join(v0, v1).hi() + slack)
                    throw Error(ErrorKind::kSplitRequired,
                                "cannot isolate the crossing near an extremum of piece #" +
                                    std::to_string(i));
                continue;
            }
            const Enclosure& low = run.direction > 0 ? v0 : v1;
            const Enclosure& high = run.direction > 0 ? v1 : v0;
            const Rat& t_low = run.direction > 0 ? run.t0 : run.t1;
            const Rat& t_high = run.direction > 0 ? run.t1 : run.t0;
            if (y < low.lo() || high.hi() < y) continue;
            if (low.is_exact() && low.mid == y) {
                points.push_back(Enclosure::exact(p.domain.lo + t_low * p.width()));
                continue;
            }
            if (high.is_exact() && high.mid == y) {
                points.push_back(Enclosure::exact(p.domain.lo + t_high * p.width()));
                continue;
            }
            if (!(low.hi() < y && y < high.lo()))
                throw Error(ErrorKind::kSearchFailure,
                            "crossing too close to an inexact run endpoint in piece #" + std::to_string(i));
            std::optional<Rat> seed;
            if (p.height == p.chord() && p.is_half_arc()) {
                seed = acospi_approx(Rat(1) - (y - p.y_start) * 2 / p.height, precision_bits + 20);
            } else if (p.shape == CurveShape::kCosFull && p.chord().is_zero()) {
                Rat s = asinpi_approx(sqrt_approx((y - p.y_start) / p.height, precision_bits + 20),
                                      precision_bits + 20);
                seed = run.t0 < Rat(1, 2) ? s : Rat(1) - s;
            }
            points.push_back(bisect_crossing(p, run.t0, run.t1, y, run.direction, precision_bits, seed));
        }
    }
    IntervalSet plats = IntervalSet::normalize(plateaus);
    std::sort(points.begin(), points.end(),
              [](const Enclosure& a, const Enclosure& b) { return a.mid < b.mid; });
    std::vector<Enclosure> unique;
    for (auto& e : points) {
        if (e.is_exact() && plats.closure_contains(e.mid)) continue;
        if (!unique.empty() && unique.back().is_exact() && e.is_exact() && unique.back().mid == e.mid)
            continue;
        unique.push_back(std::move(e));
    }
    return {std::move(unique), std::move(plats)};
}

PropertyFlags classify_properties(const PiecewiseFn& f, const std::optional<IntervalSet>& region) {
    bool any_linear = false, any_flat = false;
    auto note = [&](const Piece& p) {
        if (!p.is_linear()) return;
        any_linear = true;
        if (p.chord().is_zero()) any_flat = true;
    };
    if (region) {
        for_each_overlap(f, *region, [&](std::size_t i, const Rat&, const Rat&) { note(f.pieces()[i]); });
    } else {
        for (const auto& p : f.pieces()) note(p);
    }
    PropertyFlags flags;
    flags.a = !any_linear;
    flags.b = !any_flat;
    flags.c = !any_linear;
    flags.d = !any_flat;
    return flags;
}

PiecewiseFn affine_conjugate(const PiecewiseFn& f, const Rat& a, const Rat& b, const Rat& c,
                             const Rat& d) {
    if (a.is_zero()) throw Error(ErrorKind::kDegenerateMap, "inner affine map has zero slope");
    std::vector<Piece> out;
    out.reserve(f.pieces().size());
    for (const Piece& p : f.pieces()) {
        Rat u0 = (p.domain.lo - b) / a, u1 = (p.domain.hi - b) / a;
        Piece q;
        q.shape = p.shape;
        if (a.sign() > 0) {
            q.domain = {u0, u1};
            q.y_start = p.y_start + c * u0 + d;
            q.y_end = p.y_end + c * u1 + d;
            q.height = p.height;
        } else {
            q.domain = {u1, u0};
            q.y_start = p.y_end + c * u1 + d;
            q.y_end = p.y_start + c * u0 + d;
            q.height = p.is_half_arc() ? -p.height : p.height;
        }
        if (q.shape == CurveShape::kAffine) q.height = q.chord();
        out.push_back(std::move(q));
    }
    if (a.sign() < 0) std::reverse(out.begin(), out.end());
    return PiecewiseFn(std::move(out));
}

}  // namespace dqlab
