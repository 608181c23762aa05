#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqlab/enclosure.hpp"
#include "dqlab/errors.hpp"
#include "dqlab/interval_set.hpp"
#include "dqlab/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace dqlab;

namespace {

IntervalSet S(std::initializer_list<Interval> iv) { return IntervalSet::normalize(iv); }

bool raw_member(const std::vector<Interval>& raw, const Rat& x) {
    return std::any_of(raw.begin(), raw.end(), [&](const Interval& i) { return i.lo < i.hi && i.contains(x); });
}

// cells of width 2^-bits in [lo, hi) whose midpoint lies in s
long grid_count(const IntervalSet& s, const Rat& lo, const Rat& hi, int bits) {
    long n = 0;
    const Rat cell = Rat::pow2(-bits);
    // walk interval by interval rather than cell by cell
    for (const Interval& iv : s.intervals()) {
        Rat a = max(iv.lo, lo), b = min(iv.hi, hi);
        if (!(a < b)) continue;
        // midpoints (k + 1/2) cell in [a, b]
        Rat first = (a / cell) - Rat(1, 2);
        mpz_class lo_k = first.num() / first.den();
        if (Rat(lo_k) < first) lo_k += 1;
        Rat last = (b / cell) - Rat(1, 2);
        mpz_class hi_k = last.num() / last.den();
        if (last < Rat(hi_k)) hi_k -= 1;
        if (hi_k >= lo_k) n += mpz_class(hi_k - lo_k + 1).get_si();
    }
    return n;
}

}  // namespace

TEST_CASE("rationals parse and stay canonical") {
    CHECK(Rat::parse("6/8") == Rat(3, 4));
    CHECK(Rat::parse("-2/4").str() == "-1/2");
    CHECK(Rat::parse("5") == Rat(5));
    CHECK(Rat::pow2(-3) == Rat(1, 8));
    CHECK(Rat::pow2(4) == Rat(16));
    CHECK_THROWS_AS(Rat::parse("1/0"), Error);
    CHECK_THROWS_AS(Rat::parse("x"), Error);
    CHECK_THROWS_AS(Rat(1) / Rat(0), Error);
}

TEST_CASE("normalize") {
    CHECK(S({{0, Rat(1, 2)}, {Rat(1, 2), 1}}) == S({{0, 1}}));
    CHECK(S({{0, Rat(1, 2)}, {Rat(1, 2), 1}}).size() == 1);
    CHECK(S({{Rat(1, 4), Rat(1, 4)}}).empty());

    std::vector<Interval> raw{{Rat(1, 3), Rat(2, 3)}, {0, Rat(1, 2)}};
    IntervalSet s = IntervalSet::normalize(raw);
    CHECK(s == S({{0, Rat(2, 3)}}));
    for (int k = 0; k <= 96; ++k) CHECK(s.contains(Rat(k, 96)) == raw_member(raw, Rat(k, 96)));

    CHECK(IntervalSet::normalize(s.intervals()) == s);

    try {
        S({{0, 1}, {1, 0}});
        FAIL("expected malformed interval");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kMalformedInterval);
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("boolean operations") {
    CHECK(intersect(S({{0, 1}}), S({{Rat(1, 3), Rat(2, 3)}})) == S({{Rat(1, 3), Rat(2, 3)}}));
    CHECK(complement_in(S({{Rat(1, 4), Rat(3, 4)}}), {0, 1}) == S({{0, Rat(1, 4)}, {Rat(3, 4), 1}}));
    CHECK(measure(fat_cantor(2)) == Rat(5, 8));
    CHECK(measure(fat_cantor(3)) == Rat(9, 16));
    CHECK(measure(difference(fat_cantor(2), fat_cantor(3))) == Rat(1, 16));
    CHECK(set_union(S({{0, Rat(1, 4)}}), S({{Rat(1, 2), 1}})).size() == 2);
}

TEST_CASE("measure") {
    CHECK(measure(S({{0, 1}})) == 1);
    Rat removed = 0;
    for (int j = 1; j <= 10; ++j) removed += Rat::pow2(j - 1) / Rat::pow2(2 * j);
    CHECK(measure(fat_cantor(10)) == Rat(1) - removed);
    CHECK(measure(fat_cantor(10)) == Rat(1, 2) + Rat::pow2(-11));

    // X_1: three quarters minus two gaps of width v_0 = 1/8
    StaircaseLedger led = build_ledger(1);
    CHECK(measure(x_set(led.levels[1])) == Rat(3, 4) - 2 * Rat(1, 8));
    CHECK(measure(x_set(led.levels[1])) == Rat(1, 2));
}

TEST_CASE("density") {
    CHECK(density(S({{0, Rat(1, 2)}}), S({{0, 1}})) == Rat(1, 2));
    IntervalSet e = fat_cantor(5);
    CHECK(density(e, e) == 1);
    CHECK_THROWS_AS(density(e, S({{Rat(1, 3), Rat(1, 3)}})), Error);

    IntervalSet f = fat_cantor(10);
    IntervalSet g = S({{0, Rat(1, 4)}});
    Rat d = density(f, g);
    CHECK(Rat(0) < d);
    CHECK(d < Rat(1));
    long cells = grid_count(f, 0, Rat(1, 4), 20);
    Rat grid = Rat(cells) * Rat::pow2(-20) / Rat(1, 4);
    // each interval end can misplace at most one cell
    long ends = 2 * static_cast<long>(intersect(f, g).size());
    CHECK((d - grid).abs() <= Rat(ends) * Rat::pow2(-20) * 4);
}

TEST_CASE("density profile") {
    std::vector<Rat> r{Rat(1, 4), Rat(1, 8)};
    DensityProfile p = density_profile(S({{0, 1}}), Rat(1, 2), r);
    CHECK(p.densities == std::vector<Rat>{1, 1});
    p = density_profile(S({{0, Rat(1, 2)}}), Rat(1, 2), r);
    CHECK(p.densities == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
    CHECK_THROWS_AS(density_profile(S({{0, 1}}), 0, std::vector<Rat>{}), Error);

    IntervalSet e = fat_cantor(12);
    Rat x = e.intervals()[e.size() / 3].midpoint();
    p = density_profile(e, x, dyadic_radii(4, 10));
    REQUIRE(p.densities.size() == 7);
    CHECK(p.densities.front() < p.densities.back());
    for (std::size_t i = 1; i < p.densities.size(); ++i) CHECK(p.densities[i - 1] <= p.densities[i]);
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
        IntervalSet w = S({{max(Rat(0), x - p.radii[i]), min(Rat(1), x + p.radii[i])}});
        CHECK(p.densities[i] == measure(intersect(e, w)) / measure(w));
    }
}

TEST_CASE("fat cantor") {
    CHECK(fat_cantor(0) == S({{0, 1}}));
    CHECK(fat_cantor(1) == S({{0, Rat(3, 8)}, {Rat(5, 8), 1}}));
    CHECK(measure(fat_cantor(1)) == Rat(3, 4));
    for (int d = 0; d <= 12; ++d) {
        CHECK(measure(fat_cantor(d)) == Rat(1, 2) + Rat::pow2(-(d + 1)));
        CHECK(fat_cantor(d).size() == (1u << d));
    }
}

TEST_CASE("sample points") {
    auto a = sample_points(S({{0, 1}}), 3, 7), b = sample_points(S({{0, 1}}), 3, 7);
    CHECK(a == b);
    CHECK(a.size() == 3);
    for (const Rat& x : sample_points(S({{Rat(1, 4), Rat(1, 2)}}), 500, 3)) {
        CHECK(Rat(1, 4) <= x);
        CHECK(x <= Rat(1, 2));
    }
    CHECK_THROWS_AS(sample_points(S({{Rat(1, 2), Rat(1, 2)}}), 1, 1), Error);

    IntervalSet e = fat_cantor(8);
    const int n = 10000;
    auto pts = sample_points(e, n, 1);
    const Rat lam = measure(e);
    std::vector<long> counts(e.size(), 0);
    for (const Rat& x : pts) {
        auto it = std::upper_bound(e.intervals().begin(), e.intervals().end(), x,
                                   [](const Rat& v, const Interval& iv) { return v < iv.lo; });
        REQUIRE(it != e.intervals().begin());
        --it;
        REQUIRE(it->contains(x));
        ++counts[it - e.intervals().begin()];
    }
    // chi-square over the 256 intervals, 255 degrees of freedom
    double chi = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        double expect = n * (e.intervals()[i].length() / lam).to_double();
        chi += (counts[i] - expect) * (counts[i] - expect) / expect;
    }
    CHECK(chi < 255 + 5 * std::sqrt(2.0 * 255));
    // quarter blocks (the four depth-2 pieces) within 5% of proportional
    const std::size_t block = e.size() / 4;
    for (int q = 0; q < 4; ++q) {
        long c = 0;
        Rat len = 0;
        for (std::size_t i = q * block; i < (q + 1) * block; ++i) {
            c += counts[i];
            len += e.intervals()[i].length();
        }
        double expect = n * (len / lam).to_double();
        CHECK(std::abs(c - expect) <= 0.05 * expect);
    }
}

TEST_CASE("minus points") {
    std::vector<Rat> half{Rat(1, 2)};
    IntervalSet s = minus_points(S({{0, 1}}), half);
    CHECK(measure(s) == 1);
    CHECK(s.punctures() == half);
    CHECK_FALSE(s.contains(Rat(1, 2)));
    CHECK(s.closure_contains(Rat(1, 2)));
    CHECK(s.pieces().size() == 2);

    CHECK(minus_points(S({{0, 1}}), std::vector<Rat>{}) == S({{0, 1}}));

    std::vector<Rat> many;
    for (int k = 1; k <= 100; ++k) many.push_back(Rat(k, 101));
    IntervalSet m = minus_points(S({{0, 1}}), many);
    CHECK(measure(m) == 1);
    CHECK(m.punctures().size() == 100);
    CHECK(minus_points(S({{0, 1}}), std::vector<Rat>{Rat(3)}) == S({{0, 1}}));
}

TEST_CASE("affine image") {
    IntervalSet s = fat_cantor(3);
    IntervalSet t = affine_image(s, Rat(-2), Rat(1));
    CHECK(measure(t) == 2 * measure(s));
    CHECK(t.hull() == Interval{-1, 1});
    CHECK(affine_image(t, Rat(-1, 2), Rat(1, 2)) == s);
}

TEST_CASE("enclosures") {
    Enclosure pi = pi_enclosure(128);
    CHECK(pi_lower() < pi.lo());
    CHECK(pi.hi() < pi_upper());
    CHECK(pi.rad < Rat::pow2(-120));

    CHECK(sinpi(Rat(1, 2), 96).is_exact());
    CHECK(sinpi(Rat(1, 2), 96).mid == 1);
    CHECK(sinpi(Rat(3), 96).mid == 0);
    CHECK(cospi(Rat(1), 96).mid == -1);
    Enclosure s6 = sinpi(Rat(1, 6), 96);
    CHECK(s6.contains(Rat(1, 2)));
    CHECK(s6.rad < Rat::pow2(-90));
    Enclosure c3 = cospi(Rat(-7, 3), 96);
    CHECK(c3.contains(Rat(1, 2)));
    for (int k = -20; k <= 20; ++k) {
        Rat t(k, 7);
        Enclosure s = sinpi(t, 80), c = cospi(t, 80);
        CHECK((s * s + c * c).contains(Rat(1)));
        CHECK(std::abs(s.mid.to_double() - std::sin(M_PI * t.to_double())) < 1e-12);
    }
    CHECK(sin_rat(Rat(0), 64).is_exact());
    CHECK(std::abs(cos_rat(Rat(1), 64).mid.to_double() - std::cos(1.0)) < 1e-15);

    Enclosure a = Enclosure::hull(Rat(1), Rat(2));
    CHECK(a.certified_sign() == 1);
    CHECK(Enclosure::hull(Rat(-1), Rat(2)).certified_sign() == 0);
    CHECK_THROWS_AS(a / Enclosure::hull(Rat(-1), Rat(1)), Error);
    Enclosure t = trim(Enclosure::exact(Rat(1, 3)), 40);
    CHECK(t.contains(Rat(1, 3)));
    CHECK(t.rad <= Rat::pow2(-40));
}
