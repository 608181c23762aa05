#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqlab/errors.hpp"
#include "dqlab/staircase.hpp"

#include <algorithm>

using namespace dqlab;

namespace {

Rat pw(const Rat& b, int e) {
    Rat r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

bool disjoint_sorted(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1].hi < v[i].lo)) return false;
    return true;
}

}  // namespace

TEST_CASE("template") {
    Template t = build_template(Rat(1, 8));
    CHECK(t.rects[0] == Rect{{Rat(1, 16), Rat(7, 16)}, {0, Rat(1, 3)}});
    CHECK(t.rects[1] == Rect{{Rat(9, 16), Rat(15, 16)}, {Rat(2, 3), 1}});
    CHECK(t.rects[0].x.length() == Rat(1, 2) - Rat(1, 8));
    CHECK(t.rects[1].x.length() == t.rects[0].x.length());

    const auto& c = t.connectors;
    CHECK(c[0].shape == CurveShape::kCosFull);
    CHECK(c[0].domain == Interval{0, Rat(1, 16)});
    CHECK(c[0].y_start == 0);
    CHECK(c[0].y_end == 0);
    CHECK(c[0].height == Rat(1, 6));
    CHECK(c[1].shape == CurveShape::kSinHalf);
    CHECK(c[1].domain == Interval{Rat(7, 16), Rat(9, 16)});
    CHECK(c[1].y_end == Rat(2, 3));
    CHECK(c[2].shape == CurveShape::kCosHalf);
    CHECK(c[2].domain == Interval{Rat(15, 16), 1});
    CHECK(c[2].y_start == Rat(2, 3));
    CHECK(c[2].y_end == 0);
    for (const Piece& p : c) CHECK(p.endpoint_slope() == 0);

    Rat gaps = 1 - t.rects[0].x.length() - t.rects[1].x.length();
    CHECK(gaps == Rat(1, 4));
    CHECK(1 - gaps == Rat(3, 4));

    CHECK_THROWS_AS(build_template(Rat(1, 6)), Error);
    CHECK_THROWS_AS(build_template(Rat(0)), Error);
    CHECK_NOTHROW(build_template(Rat(1, 7)));
}

TEST_CASE("v schedule") {
    for (int k = 0; k < 12; ++k) CHECK(v_schedule(k) == Rat(1) / pw(Rat(2), 2 * k + 3));
}

TEST_CASE("default ledger measures") {
    StaircaseLedger led = build_ledger(10);
    REQUIRE(led.depth() == 10);
    CHECK(led.x_measures[0] == Rat(3, 4));
    CHECK(led.x_measures[1] == Rat(1, 2));
    CHECK(led.x_measures[2] == Rat(3, 8));
    // partial sums of the removed widths, added up directly
    Rat x = Rat(3, 4);
    for (int k = 0; k < 10; ++k) {
        CHECK(led.x_measures[k] == x);
        CHECK(led.x_measures[k] == Rat(1, 4) + Rat::pow2(-(k + 1)));
        CHECK(measure(x_set(led.levels[k])) == x);
        x -= pw(Rat(2), k + 1) * v_schedule(k);
        CHECK(led.x_measures[k + 1] < led.x_measures[k]);
    }
    CHECK(led.x_measures[10] == x);
    LimitBounds lim = x_limit_bounds(led);
    CHECK(lim.lo == Rat(1, 4));
    CHECK(lim.hi == Rat(1, 4));

    CHECK(build_ledger(0).x_measures == std::vector<Rat>{Rat(3, 4)});
}

TEST_CASE("literal affine ledger") {
    StaircaseLedger led = build_ledger(8, GapConvention::kLiteralAffine);
    Rat x(3, 4);
    for (int k = 0; k <= 8; ++k) {
        CHECK(led.x_measures[k] == x);
        CHECK(measure(x_set(led.levels[k])) == x);
        x *= 1 - 2 * v_schedule(k);
    }
    LimitBounds lim = x_limit_bounds(led);
    CHECK(lim.lo.sign() > 0);
    CHECK(lim.lo <= lim.hi);
    CHECK(lim.hi < led.x_measures[8]);
    CHECK(Rat(1, 4) < lim.lo);

    CHECK(parse_gap_convention("literal-affine") == GapConvention::kLiteralAffine);
    CHECK(std::string(to_string(GapConvention::kPaperLedger)) == "paper-ledger");
    CHECK_THROWS_AS(parse_gap_convention("other"), Error);
}

TEST_CASE("level geometry") {
    StaircaseLedger led = build_ledger(7);
    for (int k = 0; k <= 7; ++k) {
        const Level& l = led.levels[k];
        REQUIRE(l.rects.size() == (std::size_t{1} << (k + 1)));
        std::vector<Interval> xs, ys;
        for (const Rect& r : l.rects) {
            CHECK(r.x.length() == l.s);
            CHECK(r.y.length() == l.t);
            xs.push_back(r.x);
            ys.push_back(r.y);
        }
        CHECK(disjoint_sorted(xs));
        CHECK(disjoint_sorted(ys));
        CHECK(l.t <= Rat(1) / pw(Rat(3), k + 1));
        CHECK(led.y_measure_bounds[k] == pw(Rat(2), k + 1) * l.t);
        CHECK(led.y_measure_bounds[k] <= pw(Rat(2, 3), k + 1));
        CHECK(measure(y_set(l)) <= led.y_measure_bounds[k]);
        if (k > 0) {
            const Level& p = led.levels[k - 1];
            CHECK(l.t == p.h * p.t / 3);
            CHECK(l.h <= p.h);
            for (const Rect& r : l.rects)
                CHECK(std::any_of(p.rects.begin(), p.rects.end(),
                                  [&](const Rect& q) { return q.x.contains(r.x) && q.y.contains(r.y); }));
            CHECK(difference(x_set(l), x_set(p)).empty());
            CHECK(difference(y_set(l), y_set(p)).empty());
        }
    }
    CHECK(refine(led.levels[0], GapConvention::kPaperLedger).rects.size() == 4);
}

TEST_CASE("choose_h") {
    StaircaseLedger led = build_ledger(9);
    for (int k = 0; k < 9; ++k) {
        const Level& l = led.levels[k];
        CHECK(l.h <= Rat(1, 2));
        CHECK(l.h.sign() > 0);
        // every connector the next step creates is flatter than 1/(k+1)
        for (const Piece& p : led.levels[k + 1].connectors) CHECK(max_slope_upper(p) < Rat(1, k + 1));
        // and h is the largest admissible power of two below the cap
        Rat twice = l.h * 2;
        Rat cap = k == 0 ? Rat(1, 2) : led.levels[k - 1].h / 2;
        if (twice <= cap) {
            Rat g = gap_width(GapConvention::kPaperLedger, l.v, l.s);
            CHECK_FALSE(4 * pi_upper() * twice * l.t / (3 * g) < Rat(1, k + 1));
        }
    }
}

TEST_CASE("eval_g") {
    StaircaseLedger led = build_ledger(6);
    CHECK(eval_g(led, 0, 6).is_exact());
    CHECK(eval_g(led, 0, 6).mid == 0);
    Enclosure mid = eval_g(led, Rat(1, 2), 6, 96);
    CHECK(mid.contains(Rat(1, 3)));
    CHECK(mid.rad <= Rat::pow2(-96));

    for (const Rat& x : sample_points(IntervalSet::of({0, 1}), 200, 9)) {
        Enclosure prev = eval_g(led, x, 0);
        for (int d = 1; d <= 6; ++d) {
            Enclosure cur = eval_g(led, x, d);
            CHECK(prev.lo() <= cur.lo());
            CHECK(cur.hi() <= prev.hi());
            CHECK(cur.rad * 2 <= led.levels[d].t);
            prev = cur;
        }
    }
}

TEST_CASE("deriv_g_bound") {
    StaircaseLedger led = build_ledger(8);
    for (int k = 1; k <= 8; ++k) CHECK(deriv_g_bound(led, x_set(led.levels[k]), 8) < Rat(1, k));

    const Piece& c = led.levels[1].connectors[1];
    CHECK(deriv_g_bound(led, IntervalSet::of(c.domain), 8) == max_slope_upper(c));

    // on the whole square the steepest piece is a level-0 connector
    Rat top = 0;
    for (const Piece& p : led.levels[0].connectors) top = max(top, max_slope_upper(p));
    CHECK(deriv_g_bound(led, IntervalSet::of({0, 1}), 8) == top);
    CHECK(top == max_slope_upper(led.levels[0].connectors[2]));
    CHECK(max_slope_upper(led.levels[0].connectors[1]) < top);
}

TEST_CASE("level sets") {
    StaircaseLedger led = build_ledger(8);
    CHECK(level_set_check(led, Rat(1, 2), 8) == led.levels[8].s);
    CHECK(level_set_check(led, Rat(2), 8) == 0);
    CHECK(level_set_check(led, Rat(-1, 5), 8) == 0);

    StaircaseLedger six = build_ledger(6);
    PiecewiseFn g = truncation(six, 6);
    std::vector<Rat> ts = sample_points(IntervalSet::of({0, 1}), 60, 4);
    for (std::size_t i = 0; i < 40; ++i) ts.push_back(six.levels[6].rects[(i * 37) % 128].y.lo);
    int hits = 0;
    for (const Rat& t : ts) {
        Preimage p = preimage(g, t);
        if (p.plateaus.empty()) continue;
        ++hits;
        REQUIRE(p.plateaus.size() == 1);
        const Interval& pl = p.plateaus.intervals()[0];
        CHECK(std::any_of(six.levels[6].rects.begin(), six.levels[6].rects.end(),
                          [&](const Rect& r) { return r.x.contains(pl); }));
        CHECK(pl.length() <= six.levels[6].s);
    }
    CHECK(hits >= 40);
}
