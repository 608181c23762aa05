#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqlab/checks.hpp"
#include "dqlab/errors.hpp"
#include "dqlab/piecewise.hpp"
#include "dqlab/staircase.hpp"

#include <cmath>
#include <random>

using namespace dqlab;

namespace {

PiecewiseFn one(const Piece& p) { return PiecewiseFn(std::vector<Piece>{p}); }

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::kIo;
}

// sin(pi t) in double, for loose shape checks only
double sd(double t) { return std::sin(M_PI * t); }

}  // namespace

TEST_CASE("construction rejects broken functions") {
    CHECK(kind_of([] { PiecewiseFn(std::vector<Piece>{}); }) == ErrorKind::kInvalidParameter);
    CHECK(kind_of([] {
              PiecewiseFn(std::vector<Piece>{Piece::affine(0, Rat(1, 2), 0, 1), Piece::affine(Rat(1, 2), 1, 2, 3)});
          }) == ErrorKind::kInvalidParameter);
    CHECK(kind_of([] {
              PiecewiseFn(std::vector<Piece>{Piece::affine(0, Rat(1, 2), 0, 1), Piece::affine(Rat(3, 4), 1, 1, 3)});
          }) == ErrorKind::kInvalidParameter);
}

TEST_CASE("eval") {
    PiecewiseFn f = one(Piece::affine(0, 1, 1, 3));
    Enclosure v = eval(f, Rat(1, 3));
    CHECK(v.is_exact());
    CHECK(v.mid == Rat(5, 3));

    Piece p = Piece::sin_half(Rat(1, 8), Rat(3, 8), Rat(1, 5), Rat(7, 5));
    CHECK(eval(p, p.domain.lo).is_exact());
    CHECK(eval(p, p.domain.lo).mid == Rat(1, 5));
    CHECK(eval(p, p.domain.hi).mid == Rat(7, 5));
    CHECK(eval(p, p.domain.hi).is_exact());

    // sin is odd about the arc's centre, so the midpoint value is the mean of the ends
    Enclosure m = eval(sin_half_unit(), Rat(1, 2), 53);
    CHECK(m.contains(Rat(1, 2)));
    CHECK(m.rad <= Rat::pow2(-53));
    // (1 - cos(pi/3)) / 2
    CHECK(eval(sin_half_unit(), Rat(1, 3), 96).contains(Rat(1, 4)));
    Enclosure q = eval(sin_half_unit(), Rat(1, 6), 96);
    CHECK(std::abs(q.mid.to_double() - (1 - std::cos(M_PI / 6)) / 2) < 1e-15);

    CHECK(kind_of([&] { eval(f, Rat(2)); }) == ErrorKind::kOutsideDomain);
}

TEST_CASE("deriv") {
    PiecewiseFn f = one(Piece::affine(0, 1, 0, 2));
    CHECK(deriv(f, Rat(1, 7)).mid == 2);
    CHECK(deriv(f, Rat(1, 7)).is_exact());

    Piece s = Piece::sin_half(0, Rat(1, 8), 0, Rat(2, 3));
    CHECK(deriv(s, 0).is_exact());
    CHECK(deriv(s, 0).mid == 0);
    CHECK(deriv(s, Rat(1, 8)).mid == 0);
    CHECK(deriv(Piece::cos_half(0, 1, 1, 0), 1).mid == 0);
    CHECK(deriv(Piece::cos_full(0, 1, 0, 1), 0).mid == 0);

    // slope at the arc midpoint is h pi / (2 w) = (8/3) pi
    Enclosure d = deriv(s, Rat(1, 16), 96);
    CHECK(d.rad <= Rat::pow2(-50));
    Enclosure pi = pi_enclosure(120);
    CHECK(d.overlaps(pi * Rat(8, 3)));
    CHECK(std::abs(d.mid.to_double() - 8 * M_PI / 3) < 1e-13);

    PiecewiseFn sp = two_slope_spline();
    try {
        deriv(sp, Rat(1, 2));
        FAIL("expected ambiguous derivative");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kAmbiguousDerivative);
        CHECK(std::string(e.what()).find("1/2") != std::string::npos);
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_FALSE(is_c1(sp));

    // flat, arc, flat: one-sided slopes agree at both joins
    PiecewiseFn c1(std::vector<Piece>{Piece::affine(0, Rat(1, 4), 0, 0), Piece::sin_half(Rat(1, 4), Rat(3, 4), 0, 1),
                                      Piece::affine(Rat(3, 4), 1, 1, 1)});
    CHECK(is_c1(c1));
    CHECK(deriv(c1, Rat(1, 4)).mid == 0);
}

TEST_CASE("dq") {
    PiecewiseFn id = one(Piece::affine(0, 1, 0, 1));
    CHECK(dq(id, Rat(1, 5), Rat(4, 7)).mid == 1);
    CHECK(dq(id, Rat(1, 5), Rat(4, 7)).is_exact());

    PiecewiseFn chord(std::vector<Piece>{Piece::affine(0, Rat(1, 2), 0, Rat(1, 4)), Piece::affine(Rat(1, 2), 1, Rat(1, 4), 1)});
    CHECK(dq(chord, 0, 1).mid == 1);
    CHECK(dq(chord, 0, 1).is_exact());
    CHECK(dq(chord, 1, 0).mid == dq(chord, 0, 1).mid);

    CHECK(kind_of([&] { dq(id, Rat(1, 3), Rat(1, 3)); }) == ErrorKind::kDiagonalExcluded);

    Enclosure a = dq(sin_half_unit(), Rat(1, 10), Rat(2, 3));
    Enclosure b = dq(sin_half_unit(), Rat(2, 3), Rat(1, 10));
    CHECK(a.overlaps(b));
    double exact = ((1 - std::cos(M_PI * 2 / 3)) - (1 - std::cos(M_PI / 10))) / 2 / (2.0 / 3 - 0.1);
    CHECK(std::abs(a.mid.to_double() - exact) < 1e-14);

    // staircase at depth 5, pair across the middle
    StaircaseLedger led = build_ledger(5);
    PiecewiseFn g = truncation(led, 5);
    Rat x1(3, 10), x2(7, 10);
    Enclosure q = dq(g, x1, x2);
    SlopeBounds sb = slope_bounds(g, IntervalSet::of({x1, x2}));
    CHECK(sb.lo <= q.lo());
    CHECK(q.hi() <= sb.hi);
}

TEST_CASE("slope bounds") {
    SlopeBounds a = slope_bounds(one(Piece::affine(0, 1, 0, 3)), IntervalSet::of({Rat(1, 4), Rat(1, 2)}));
    CHECK(a.lo == 3);
    CHECK(a.hi == 3);

    SlopeBounds s = slope_bounds(one(Piece::sin_half(0, Rat(1, 4), 0, 1)), IntervalSet::of({0, Rat(1, 4)}));
    CHECK(s.lo == 0);
    CHECK(2 * pi_lower() <= s.hi);
    CHECK(s.hi <= 2 * pi_upper());

    CHECK_THROWS_AS(slope_bounds(sin_half_unit(), IntervalSet{}), Error);
}

TEST_CASE("max slope closed forms") {
    Piece s = Piece::sin_half(0, Rat(1, 8), 0, Rat(2, 3));
    CHECK(max_slope_upper(s) == Rat(2, 3) * pi_upper() / (2 * Rat(1, 8)));
    CHECK(max_slope_upper(Piece::affine(0, Rat(1, 2), 1, 0)) == 2);

    // sin^2(pi t) on [0, 1] has slope pi sin(2 pi t): its maximum pi is twice h pi / (2 w)
    Piece full = Piece::cos_full(0, 1, 0, 1);
    Enclosure peak = deriv(full, Rat(1, 4), 96);
    CHECK(peak.overlaps(pi_enclosure(100)));
    CHECK(peak.hi() <= max_slope_upper(full));
    CHECK(pi_upper() / 2 < peak.lo());

    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        PiecewiseFn f = random_piecewise(rng);
        for (const Piece& p : f.pieces())
            for (int k = 0; k <= 16; ++k) {
                Rat x = p.domain.lo + p.width() * Rat(k, 16);
                CHECK(deriv(p, x).mag() <= max_slope_upper(p));
            }
    }
}

TEST_CASE("image measure bounds") {
    MeasureBounds m = image_measure_bounds(one(Piece::affine(0, 1, 0, 2)), IntervalSet::of({0, Rat(1, 2)}));
    CHECK(m.lo == 1);
    CHECK(m.hi == 1);
    m = image_measure_bounds(one(Piece::affine(0, 1, Rat(1, 3), Rat(1, 3))), fat_cantor(4));
    CHECK(m.lo == 0);
    CHECK(m.hi == 0);

    StaircaseLedger led = build_ledger(3);
    m = image_measure_bounds(truncation(led, 3), x_set(led.levels[3]));
    CHECK(m.lo <= m.hi);
    CHECK(m.hi <= led.y_measure_bounds[3]);
    CHECK(led.y_measure_bounds[3] <= Rat(16, 81));

    // sin_half is increasing: image of [a, b] is [f(a), f(b)]
    IntervalSet e = fat_cantor(3);
    m = image_measure_bounds(sin_half_unit(), e);
    double img = 0;
    for (const Interval& iv : e.intervals())
        img += (std::cos(M_PI * iv.lo.to_double()) - std::cos(M_PI * iv.hi.to_double())) / 2;
    CHECK(m.lo.to_double() <= img + 1e-15);
    CHECK(img - 1e-15 <= m.hi.to_double());

    // an arc sheared until its chord vanishes rises then falls
    Piece bent = Piece::sin_half(0, 1, 0, 0);
    bent.height = 1;
    PiecewiseFn tilt = one(bent);
    CHECK(kind_of([&] { image_measure_bounds(tilt, IntervalSet::of({0, 1})); }) == ErrorKind::kSplitRequired);

    // untilted COS_FULL is split at the apex instead
    m = image_measure_bounds(one(Piece::cos_full(0, 1, 0, Rat(1, 2))), IntervalSet::of({0, 1}));
    CHECK(m.lo <= Rat(1, 2));
    CHECK(Rat(1, 2) <= m.hi);
}

TEST_CASE("preimage") {
    Preimage p = preimage(one(Piece::affine(0, 1, 0, 1)), Rat(1, 3));
    REQUIRE(p.points.size() == 1);
    CHECK(p.points[0].is_exact());
    CHECK(p.points[0].mid == Rat(1, 3));
    CHECK(p.plateaus.empty());

    PiecewiseFn f(std::vector<Piece>{Piece::affine(0, Rat(1, 8), 0, Rat(1, 4)),
                                     Piece::affine(Rat(1, 8), Rat(1, 4), Rat(1, 4), Rat(1, 4)),
                                     Piece::sin_half(Rat(1, 4), 1, Rat(1, 4), 1)});
    p = preimage(f, Rat(1, 4));
    CHECK(p.plateaus == IntervalSet::of({Rat(1, 8), Rat(1, 4)}));
    CHECK(p.points.empty());
    p = preimage(f, Rat(1, 8));
    REQUIRE(p.points.size() == 1);
    CHECK(p.points[0].mid == Rat(1, 16));

    p = preimage(sin_half_unit(), Rat(1, 4), 96);
    REQUIRE(p.points.size() == 1);
    CHECK(p.points[0].contains(Rat(1, 3)));
    CHECK(p.points[0].rad <= Rat::pow2(-90));

    // COS_FULL bump meets a level below the apex twice
    p = preimage(one(Piece::cos_full(0, 1, 0, 1)), Rat(1, 2), 80);
    REQUIRE(p.points.size() == 2);
    CHECK(p.points[0].contains(Rat(1, 4)));
    CHECK(p.points[1].contains(Rat(3, 4)));
    CHECK(preimage(sin_half_unit(), Rat(2)).points.empty());

    StaircaseLedger led = build_ledger(4);
    PiecewiseFn g = truncation(led, 4);
    for (const Rat& y : sample_points(IntervalSet::of({0, 1}), 100, 3)) {
        Preimage q = preimage(g, y);
        CHECK(measure(q.plateaus) <= led.levels[4].s);
        for (const auto& pt : q.points) CHECK(eval(g, pt.mid).overlaps(Enclosure{y, pt.rad * 100}));
    }
}

TEST_CASE("classify properties") {
    PropertyFlags flat = classify_properties(one(Piece::affine(0, 1, 2, 2)));
    CHECK_FALSE(flat.a);
    CHECK_FALSE(flat.b);
    CHECK_FALSE(flat.c);
    CHECK_FALSE(flat.d);

    PropertyFlags s = classify_properties(sin_half_unit());
    CHECK(s.a);
    CHECK(s.b);
    CHECK(s.c);
    CHECK(s.d);

    PropertyFlags sloped = classify_properties(one(Piece::affine(0, 1, 0, 2)));
    CHECK_FALSE(sloped.a);
    CHECK(sloped.b);
    CHECK_FALSE(sloped.c);
    CHECK(sloped.d);

    StaircaseLedger led = build_ledger(3);
    CHECK_FALSE(classify_properties(truncation(led, 3)).d);
    // restricted to the connectors only there is nothing flat
    const Piece& conn = led.levels[1].connectors[1];
    CHECK(classify_properties(truncation(led, 3), IntervalSet::of(conn.domain)).d);
}

TEST_CASE("affine conjugate") {
    PiecewiseFn f = random_piecewise(*std::make_unique<std::mt19937_64>(11));
    CHECK(affine_conjugate(f, 1, 0, 0, 0) == f);
    CHECK_THROWS_AS(affine_conjugate(f, 0, 0, 0, 0), Error);

    PiecewiseFn lin = one(Piece::affine(0, 1, 1, 4));  // slope 3
    PiecewiseFn g = affine_conjugate(lin, Rat(-1, 2), Rat(1, 2), Rat(5), Rat(1));
    for (const Piece& p : g.pieces()) CHECK(p.endpoint_slope() == Rat(3) * Rat(-1, 2) + 5);

    // the normalisation sends the pair to -1, 1 and kills both ends
    PiecewiseFn sp = two_slope_spline();
    Rat x1(1, 8), x2(7, 8);
    Rat f1 = eval(sp, x1).mid, f2 = eval(sp, x2).mid;
    Rat a = (x2 - x1) / 2, b = (x1 + x2) / 2, c = (f1 - f2) / 2, d = -(f1 + f2) / 2;
    CHECK(a * -1 + b == x1);
    CHECK(c * -1 + d == -f1);
    PiecewiseFn h = affine_conjugate(sp, a, b, c, d);
    CHECK(h.domain() == Interval{-b / a, (1 - b) / a});
    CHECK(eval(h, -1).is_exact());
    CHECK(eval(h, -1).mid == 0);
    CHECK(eval(h, 1).mid == 0);

    Enclosure lhs = dq(affine_conjugate(sin_half_unit(), Rat(-1, 2), Rat(1, 2), 3, 0), Rat(1, 5), Rat(4, 5));
    Enclosure rhs = dq(sin_half_unit(), Rat(2, 5), Rat(1, 10)) * Rat(-1, 2) + Rat(3);
    CHECK(lhs.overlaps(rhs));
    CHECK(std::abs(lhs.mid.to_double() - (-0.5 * (sd(0.4 - 0.5) - sd(0.1 - 0.5)) / 2 / 0.3 + 3)) < 1e-13);
}
