#include "dqlab/staircase.hpp"

#include "dqlab/errors.hpp"

#include <algorithm>

namespace dqlab {

namespace {

// The five parts of T(F) for the rectangle r, gap G and tamping h.
void place_template(const Rect& r, const Rat& gap, const Rat& h, std::vector<Rect>& rects,
                    std::vector<Piece>& connectors) {
    const Rat& a = r.x.lo;
    const Rat& b = r.x.hi;
    const Rat& c = r.y.lo;
    const Rat ht = h * (r.y.hi - r.y.lo);
    const Rat q = gap / 4;
    const Rat mid = r.x.midpoint();
    const Rat third = c + ht / 3, two_thirds = c + ht * 2 / 3;

    connectors.push_back(Piece::cos_full(a, a + q, c, ht / 6));
    rects.push_back({{a + q, mid - q}, {c, third}});
    connectors.push_back(Piece::sin_half(mid - q, mid + q, c, two_thirds));
    rects.push_back({{mid + q, b - q}, {two_thirds, c + ht}});
    connectors.push_back(Piece::cos_half(b - q, b, two_thirds, c));
}

template <class T, class Key>
const T* find_covering(const std::vector<T>& v, const Rat& x, Key key) {
    auto it = std::lower_bound(v.begin(), v.end(), x,
                               [&](const T& e, const Rat& val) { return key(e).hi < val; });
    if (it != v.end() && key(*it).contains(x)) return &*it;
    return nullptr;
}

const Level& level_at(const StaircaseLedger& ledger, int depth) {
    if (depth < 0 || depth > ledger.depth())
        throw Error(ErrorKind::kInvalidParameter,
                    "depth " + std::to_string(depth) + " outside the ledger (0.." +
                        std::to_string(ledger.depth()) + ")");
    return ledger.levels[depth];
}

}  // namespace

const char* to_string(GapConvention c) {
    return c == GapConvention::kPaperLedger ? "paper-ledger" : "literal-affine";
}

GapConvention parse_gap_convention(const std::string& s) {
    if (s == "paper-ledger") return GapConvention::kPaperLedger;
    if (s == "literal-affine") return GapConvention::kLiteralAffine;
    throw Error(ErrorKind::kInvalidParameter, "unknown gap convention '" + s + "'");
}

Rat v_schedule(int k) { return Rat::pow2(-(2L * k + 3)); }

Template build_template(const Rat& v) {
    if (v.sign() <= 0 || !(v < Rat(1, 6)))
        throw Error(ErrorKind::kInvalidParameter, "template gap v must lie in (0, 1/6), got " + v.str());
    std::vector<Rect> rects;
    std::vector<Piece> conn;
    place_template({{0, 1}, {0, 1}}, v * 2, 1, rects, conn);
    return {v, {rects[0], rects[1]}, {conn[0], conn[1], conn[2]}};
}

Rat gap_width(GapConvention c, const Rat& v, const Rat& s) {
    return c == GapConvention::kPaperLedger ? v : v * s * 2;
}

Rat choose_h(int k, const Rat& s, const Rat& t, const Rat& v, GapConvention c, const Rat& h_prev) {
    if (k < 0 || s.sign() <= 0 || t.sign() <= 0 || v.sign() <= 0 || h_prev.sign() <= 0)
        throw Error(ErrorKind::kInvalidParameter, "choose_h needs k >= 0 and positive s, t, v, h_prev");
    const Rat gap = gap_width(c, v, s);
    const Rat limit = Rat(1, k + 1);
    Rat h(1, 2);
    while (h_prev / 2 < h) h /= 2;
    while (!(pi_upper() * h * t * 4 / (gap * 3) < limit)) h /= 2;
    return h;
}

Level refine(const Level& level, GapConvention c) {
    const Rat gap = gap_width(c, level.v, level.s);
    if (!(gap < level.s))
        throw Error(ErrorKind::kInvalidParameter,
                    "gap " + gap.str() + " does not fit in rectangle width " + level.s.str());
    Level next;
    next.k = level.k + 1;
    next.rects.reserve(level.rects.size() * 2);
    next.connectors.reserve(level.rects.size() * 3);
    for (const Rect& r : level.rects) place_template(r, gap, level.h, next.rects, next.connectors);
    next.v = v_schedule(next.k);
    next.s = (level.s - gap) / 2;
    next.t = level.h * level.t / 3;
    return next;
}

StaircaseLedger build_ledger(int depth, GapConvention c) {
    if (depth < 0) throw Error(ErrorKind::kInvalidParameter, "depth must be >= 0");
    StaircaseLedger led;
    led.convention = c;

    Template f0 = build_template(v_schedule(0));
    Level l0;
    l0.k = 0;
    l0.rects.assign(f0.rects.begin(), f0.rects.end());
    l0.connectors.assign(f0.connectors.begin(), f0.connectors.end());
    l0.v = f0.v;
    l0.s = f0.rects[0].x.length();
    l0.t = f0.rects[0].y.length();
    l0.h = choose_h(0, l0.s, l0.t, l0.v, c);
    led.levels.push_back(std::move(l0));

    for (int k = 1; k <= depth; ++k) {
        const Level& prev = led.levels.back();
        Level next = refine(prev, c);
        for (std::size_t i = 0; i < next.rects.size(); ++i) {
            const Rect& child = next.rects[i];
            const Rect& parent = prev.rects[i / 2];
            if (!parent.x.contains(child.x) || !parent.y.contains(child.y))
                throw Error(ErrorKind::kInvalidParameter,
                            "level " + std::to_string(k) + " rectangle escapes its parent");
        }
        next.h = choose_h(k, next.s, next.t, next.v, c, prev.h);
        led.levels.push_back(std::move(next));
    }
    for (const Level& l : led.levels) {
        Rat count = Rat::pow2(l.k + 1);
        led.x_measures.push_back(count * l.s);
        led.y_measure_bounds.push_back(count * l.t);
    }
    return led;
}

IntervalSet x_set(const Level& level) {
    std::vector<Interval> v;
    v.reserve(level.rects.size());
    for (const Rect& r : level.rects) v.push_back(r.x);
    return IntervalSet::normalize(v);
}

IntervalSet y_set(const Level& level) {
    std::vector<Interval> v;
    v.reserve(level.rects.size());
    for (const Rect& r : level.rects) v.push_back(r.y);
    return IntervalSet::normalize(v);
}

PiecewiseFn truncation(const StaircaseLedger& ledger, int depth) {
    const Level& deepest = level_at(ledger, depth);
    std::vector<Piece> pieces;
    for (int k = 0; k <= depth; ++k)
        pieces.insert(pieces.end(), ledger.levels[k].connectors.begin(), ledger.levels[k].connectors.end());
    for (const Rect& r : deepest.rects) pieces.push_back(Piece::affine(r.x.lo, r.x.hi, r.y.lo, r.y.lo));
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return a.domain.lo < b.domain.lo; });
    return PiecewiseFn(std::move(pieces));
}

Enclosure eval_g(const StaircaseLedger& ledger, const Rat& x, int depth, int precision_bits) {
    const Level& deepest = level_at(ledger, depth);
    if (x < 0 || 1 < x) throw Error(ErrorKind::kOutsideDomain, x.str() + " is outside [0, 1]");
    auto dom = [](const Piece& p) -> const Interval& { return p.domain; };
    auto rx = [](const Rect& r) -> const Interval& { return r.x; };
    for (int k = 0; k <= depth; ++k) {
        const Level& lv = ledger.levels[k];
        if (const Piece* p = find_covering(lv.connectors, x, dom)) {
            Enclosure e = eval(*p, x, precision_bits);
            if (k == 0) return e;
            const Rect* parent = find_covering(ledger.levels[k - 1].rects, x, rx);
            Rat lo = max(e.lo(), parent->y.lo), hi = min(e.hi(), parent->y.hi);
            return e.is_exact() ? e : Enclosure::hull(lo, hi);
        }
    }
    const Rect* r = find_covering(deepest.rects, x, rx);
    if (!r) throw Error(ErrorKind::kSearchFailure, "no rectangle or connector above " + x.str());
    return Enclosure::hull(r->y.lo, r->y.hi);
}

Rat deriv_g_bound(const StaircaseLedger& ledger, const IntervalSet& region, int depth) {
    const Level& deepest = level_at(ledger, depth);
    Rat bound = 0;
    for (int k = 0; k <= depth; ++k) {
        const auto& conn = ledger.levels[k].connectors;
        const auto& ivs = region.intervals();
        std::size_t i = 0, j = 0;
        while (i < conn.size() && j < ivs.size()) {
            if (max(conn[i].domain.lo, ivs[j].lo) < min(conn[i].domain.hi, ivs[j].hi))
                bound = max(bound, max_slope_upper(conn[i]));
            if (conn[i].domain.hi < ivs[j].hi) ++i; else ++j;
        }
    }
    if (measure(intersect(region, x_set(deepest))).sign() > 0) bound = max(bound, Rat(1, depth + 1));
    return bound;
}

Rat level_set_check(const StaircaseLedger& ledger, const Rat& t, int depth) {
    const Level& deepest = level_at(ledger, depth);
    if (t < 0 || 1 < t) return 0;
    return deepest.s;
}

LimitBounds x_limit_bounds(const StaircaseLedger& ledger) {
    const int d = ledger.depth();
    const Rat& xd = ledger.x_measures.back();
    if (ledger.convention == GapConvention::kPaperLedger) {
        // sum_{k >= d} 2^(k+1) 2^-(2k+3) = 2^-(d+1)
        Rat lim = xd - Rat::pow2(-(d + 1));
        return {lim, lim};
    }
    // sum_{k >= d} 2 v_k = 4^-d / 3
    Rat tail = Rat::pow2(-2L * d) / 3;
    return {xd * (Rat(1) - tail), xd * (Rat(1) - v_schedule(d) * 2)};
}

}  // namespace dqlab
