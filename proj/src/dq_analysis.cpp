#include "dqlab/dq_analysis.hpp"

#include "dqlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dqlab {

namespace {

const Rat& residual_target() {
    static const Rat r = Rat::pow2(-60);
    return r;
}

// Closed interval iv (possibly a single point) lies inside the closed set s.
bool inside(const IntervalSet& s, const Interval& iv) {
    if (iv.hi < iv.lo) return false;
    if (iv.lo == iv.hi) return s.closure_contains(iv.lo);
    return measure(intersect(s, IntervalSet::of(iv))) == iv.length();
}

// Off-diagonal pairs drawn from e, reproducible per seed.
std::vector<std::pair<Rat, Rat>> sample_pairs(const IntervalSet& e, std::size_t n, std::uint64_t seed) {
    std::vector<Rat> pts = sample_points(e, 2 * n + 64, seed);
    std::vector<std::pair<Rat, Rat>> out;
    out.reserve(n);
    for (std::size_t i = 0; i + 1 < pts.size() && out.size() < n; i += 2)
        if (pts[i] != pts[i + 1]) out.emplace_back(pts[i], pts[i + 1]);
    if (out.size() < n) throw Error(ErrorKind::kCannotSample, "too many diagonal draws");
    return out;
}

// phi(x) = x sin(theta) + g(x) cos(theta): height after rotating (x, g(x)) by theta.
Enclosure phi(const PiecewiseFn& g, const Rat& x, const Enclosure& sn, const Enclosure& cs, int bits) {
    return sn * x + cs * eval(g, x, bits);
}

struct Side {
    Interval window;
    int sign = 0;  // sign of g' near the center
    SlopeBounds slopes;
    std::vector<Interval> comps;  // components of F inside the window
};

struct Trig {
    Enclosure sn, cs;
};

Trig trig(const Rat& theta, int bits) { return {sin_rat(theta, bits), cos_rat(theta, bits)}; }

// Vertical line test and fixed sign of the rotated slope over both windows.
bool slopes_admissible(const Side (&sides)[2], const Trig& tr) {
    for (const Side& s : sides) {
        for (const Rat* k : {&s.slopes.lo, &s.slopes.hi}) {
            if ((tr.cs - tr.sn * *k).certified_sign() <= 0) return false;
            if ((tr.sn + tr.cs * *k).certified_sign() != s.sign) return false;
        }
    }
    return true;
}

bool admissible_pm(const Side (&sides)[2], const Rat& theta, int bits) {
    Trig t = trig(theta, bits);
    Trig neg{-t.sn, t.cs};
    return slopes_admissible(sides, t) && slopes_admissible(sides, neg);
}

// Approximate point of c where a monotone function with direction `dir`
// reaches y; stays inside c.
template <class F>
Rat invert_approx(const F& fn, const Interval& c, double y, int dir) {
    Rat lo = c.lo, hi = c.hi;
    for (int i = 0; i < 60; ++i) {
        Rat mid = (lo + hi) / 2;
        if ((fn(mid) - y) * dir < 0) lo = mid; else hi = mid;
    }
    return (lo + hi) / 2;
}

// Inner bound of DQ_g over cm x cp from its four corner values.
Interval covered_range(const PiecewiseFn& g, const Interval& cm, const Interval& cp, int bits) {
    Rat lo_hi, hi_lo;
    bool first = true;
    for (const Rat* u : {&cm.lo, &cm.hi})
        for (const Rat* v : {&cp.lo, &cp.hi}) {
            Enclosure q = dq(g, *u, *v, bits);
            if (first) { lo_hi = q.hi(); hi_lo = q.lo(); first = false; }
            else { lo_hi = min(lo_hi, q.hi()); hi_lo = max(hi_lo, q.lo()); }
        }
    return {lo_hi, hi_lo};
}

Enclosure witness_slope(const Rat& theta, int bits) {
    if (theta.is_zero()) return Enclosure::exact(0);
    Trig t = trig(theta, bits);
    return -(t.sn / t.cs);
}

std::optional<Witness> find_witness(const PiecewiseFn& g, const Side& minus, const Side& plus,
                                    const Rat& theta, int bits) {
    const int wb = bits + 40;
    Trig tr = trig(theta, wb);
    Trig tr_d = trig(theta, 64);
    auto phi_d = [&](const Rat& x) { return phi(g, x, tr_d.sn, tr_d.cs, 64).mid.to_double(); };

    Witness w;
    w.theta = theta;
    const Interval* cm = nullptr;
    const Interval* cp = nullptr;
    if (theta.is_zero()) {
        for (const auto& c : minus.comps) if (c.contains(Rat(-1))) cm = &c;
        for (const auto& c : plus.comps) if (c.contains(Rat(1))) cp = &c;
        if (cm && cp) w.x_minus = -1;
    }
    if (!cm || !cp) {
        cm = cp = nullptr;
        double best = 0;
        std::vector<std::pair<double, double>> im, ip;
        for (const auto& c : minus.comps) {
            double a = phi_d(c.lo), b = phi_d(c.hi);
            im.emplace_back(std::min(a, b), std::max(a, b));
        }
        for (const auto& c : plus.comps) {
            double a = phi_d(c.lo), b = phi_d(c.hi);
            ip.emplace_back(std::min(a, b), std::max(a, b));
        }
        double target = 0;
        for (std::size_t i = 0; i < im.size(); ++i)
            for (std::size_t j = 0; j < ip.size(); ++j) {
                double lo = std::max(im[i].first, ip[j].first), hi = std::min(im[i].second, ip[j].second);
                if (hi - lo > best) {
                    best = hi - lo;
                    cm = &minus.comps[i];
                    cp = &plus.comps[j];
                    target = (lo + hi) / 2;
                }
            }
        if (!cm) return std::nullopt;
        w.x_minus = invert_approx(phi_d, *cm, target, minus.sign);
    }
    w.c_minus = *cm;
    w.c_plus = *cp;

    const Enclosure base = phi(g, w.x_minus, tr.sn, tr.cs, wb);
    auto psi = [&](const Rat& x) { return phi(g, x, tr.sn, tr.cs, wb) - base; };

    // exact crossing at the symmetric pair
    if (theta.is_zero() && w.x_minus == Rat(-1)) {
        Enclosure r = psi(Rat(1));
        if (r.is_exact() && r.mid.is_zero()) {
            w.x_plus = 1;
            w.bracket = {1, 1};
            w.residual_bound = 0;
            w.covered = covered_range(g, *cm, *cp, bits);
            return w;
        }
    }

    Rat a = cp->lo, b = cp->hi;
    Enclosure pa = psi(a), pb = psi(b);
    const int dir = plus.sign;
    if (pa.certified_sign() * dir >= 0 || pb.certified_sign() * dir <= 0) return std::nullopt;
    bool found = false;
    for (int it = 0; it < 400; ++it) {
        Rat m = (a + b) / 2;
        Enclosure v = psi(m);
        if (v.mag() <= residual_target()) {
            w.x_plus = m;
            w.residual_bound = v.mag();
            found = true;
            break;
        }
        int sd = v.certified_sign() * dir;
        if (sd < 0) a = m;
        else if (sd > 0) b = m;
        else return std::nullopt;
    }
    if (!found) return std::nullopt;
    w.bracket = {a, b};
    w.covered = covered_range(g, *cm, *cp, bits);
    return w;
}

struct ScanAttempt {
    std::vector<Witness> witnesses;
    Interval certified;
    std::string failure;
};

ScanAttempt attempt_scan(const PiecewiseFn& g, const Side (&sides)[2], const Rat& theta_max, int grid,
                         int bits) {
    ScanAttempt out;
    std::vector<Rat> thetas;
    if (grid == 1) thetas.push_back(0);
    for (int j = 0; grid > 1 && j < grid; ++j) thetas.push_back(theta_max * Rat(2 * j - (grid - 1), grid - 1));
    for (const Rat& th : thetas) {
        if (!slopes_admissible(sides, trig(th, bits))) {
            out.failure = "slope condition fails at theta " + th.str();
            return out;
        }
        auto w = find_witness(g, sides[0], sides[1], th, bits);
        if (!w) {
            out.failure = "no certified crossing at theta " + th.str();
            return out;
        }
        out.witnesses.push_back(std::move(*w));
    }
    std::vector<Interval> cov;
    for (const auto& w : out.witnesses)
        if (w.covered.lo < w.covered.hi) cov.push_back(w.covered);
    IntervalSet u = IntervalSet::normalize(cov);
    const Interval* comp = nullptr;
    for (const auto& iv : u.intervals())
        if (iv.lo.sign() < 0 && iv.hi.sign() > 0) comp = &iv;
    if (!comp) {
        out.failure = "covered ranges do not surround 0";
        return out;
    }
    for (const auto& w : out.witnesses) {
        Enclosure s = witness_slope(w.theta, bits);
        if (!(comp->lo < s.lo() && s.hi() < comp->hi)) {
            out.failure = "witness slope at theta " + w.theta.str() + " escapes the covered component";
            return out;
        }
    }
    out.certified = *comp;
    return out;
}

}  // namespace

Enclosure deriv_hull(const PiecewiseFn& f, const Rat& x, int precision_bits) {
    try {
        return deriv(f, x, precision_bits);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::kAmbiguousDerivative) throw;
        std::size_t i = f.locate(x);
        Rat l = f.pieces()[i].endpoint_slope(), r = f.pieces()[i + 1].endpoint_slope();
        return Enclosure::hull(min(l, r), max(l, r));
    }
}

DQSample dq_sample(const PiecewiseFn& f, const Rat& x1, const Rat& x2, int precision_bits) {
    return {x1, x2, dq(f, x1, x2, precision_bits), deriv_hull(f, x1, precision_bits),
            deriv_hull(f, x2, precision_bits)};
}

PositiveImageReport verify_positive_image(const PiecewiseFn& f, const IntervalSet& e,
                                          const PositiveImageOptions& opt) {
    if (measure(e).sign() <= 0) throw Error(ErrorKind::kPreconditionViolation, "E has measure zero");
    if (!classify_properties(f, e).b)
        throw Error(ErrorKind::kPreconditionViolation, "f is constant on a piece meeting E (property B fails)");
    const Interval dom = f.domain();

    std::vector<Interval> cands = e.intervals();
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Interval& a, const Interval& b) { return b.length() < a.length(); });
    if (cands.size() > 64) cands.resize(64);

    for (const Interval& c : cands) {
        Rat x0 = c.midpoint();
        if (!dom.contains(x0)) continue;
        DensityProfile prof = density_profile(e, x0, opt.radii, dom);
        if (prof.densities.back() < opt.min_density) continue;
        Enclosure d = deriv_hull(f, x0, opt.precision_bits);
        if (d.certified_sign() == 0) continue;

        PositiveImageReport rep;
        rep.x0 = x0;
        rep.profile = std::move(prof);
        rep.m = d.mig();
        rep.sign = d.certified_sign();
        const Rat half = rep.m / 2;
        bool found = false;
        for (int j = 0; j < 200 && !found; ++j) {
            Interval I = dom;
            if (j > 0) {
                Rat r = dom.length() * Rat::pow2(-j);
                I = {max(dom.lo, x0 - r), min(dom.hi, x0 + r)};
            }
            SlopeBounds sb = slope_bounds(f, IntervalSet::of(I), opt.precision_bits);
            if ((rep.sign > 0 && half <= sb.lo) || (rep.sign < 0 && sb.hi <= -half)) {
                rep.I = I;
                rep.slopes_on_I = sb;
                found = true;
            }
        }
        if (!found) continue;
        rep.lower_bound = half * measure(intersect(e, IntervalSet::of(rep.I)));
        rep.image = image_measure_bounds(f, e, opt.precision_bits);
        if (rep.image.hi < rep.lower_bound)
            throw Error(ErrorKind::kSearchFailure, "lower bound " + rep.lower_bound.str() +
                                                       " exceeds the image upper bound " + rep.image.hi.str());
        return rep;
    }
    throw Error(ErrorKind::kSearchFailure,
                "no density point of E with f' != 0: density at radius " + opt.radii.back().str() +
                    " stayed below " + opt.min_density.str());
}

PorcupineReport porcupine_check(const PiecewiseFn& f, const IntervalSet& e, std::size_t n,
                                std::uint64_t seed, int precision_bits) {
    if (n == 0) throw Error(ErrorKind::kInvalidParameter, "porcupine needs n >= 1");
    if (measure(e).sign() <= 0) throw Error(ErrorKind::kPreconditionViolation, "E has measure zero");
    if (!classify_properties(f, e).c)
        throw Error(ErrorKind::kPreconditionViolation, "f is linear on a piece meeting E (property C fails)");
    PorcupineReport rep;
    rep.tolerance = Rat::pow2(-80);
    for (const auto& [x1, x2] : sample_pairs(e, n, seed)) {
        DQSample s = dq_sample(f, x1, x2, precision_bits);
        ++rep.pairs;
        auto close = [&](const Enclosure& d) {
            return (s.dq_value.mid - d.mid).abs() <= s.dq_value.rad + d.rad + rep.tolerance;
        };
        if (close(s.d1) || close(s.d2)) {
            ++rep.equality_hits;
            if (rep.hits.size() < 10) rep.hits.push_back(std::move(s));
        }
    }
    return rep;
}

DQCertificate rotation_scan(const PiecewiseFn& g, const IntervalSet& f_set, const RotationOptions& opt) {
    const int bits = opt.precision_bits;
    if (opt.grid < 1) throw Error(ErrorKind::kInvalidParameter, "grid must be >= 1");
    const Interval dom = g.domain();
    if (!dom.contains(Rat(-1)) || !dom.contains(Rat(1)))
        throw Error(ErrorKind::kPreconditionViolation, "g is not defined at -1 and 1");
    const Rat tiny = Rat::pow2(-64);
    Enclosure gm = eval(g, -1, bits), gp = eval(g, 1, bits);
    if (tiny < gm.mag() || tiny < gp.mag())
        throw Error(ErrorKind::kPreconditionViolation,
                    "g(-1) = " + gm.mid.str() + ", g(1) = " + gp.mid.str() + " are not 0");
    Enclosure dm = deriv_hull(g, -1, bits), dp = deriv_hull(g, 1, bits);
    if (dm.certified_sign() == 0 || dp.certified_sign() == 0)
        throw Error(ErrorKind::kPreconditionViolation, "g'(-1) or g'(1) is not bounded away from 0");

    DQCertificate cert;
    cert.m = min(dm.mig(), dp.mig()) / 2;
    cert.M = max(dm.mag(), dp.mag()) * 2;
    cert.density_threshold = Rat(1) - cert.m / (cert.M * 4);
    cert.grid = opt.grid;

    Side sides[2];
    sides[0].sign = dm.certified_sign();
    sides[1].sign = dp.certified_sign();
    bool window_found = false, slope_ok_somewhere = false;
    Rat best_density = -1, best_radius = 0;
    for (int j = 2; j <= 48 && !window_found; ++j) {
        const Rat r = Rat::pow2(-j);
        bool ok = true;
        for (int s = 0; s < 2 && ok; ++s) {
            const Rat center = s == 0 ? Rat(-1) : Rat(1);
            Interval w{center - r, center + r};
            if (!dom.contains(w)) { ok = false; break; }
            SlopeBounds sb = slope_bounds(g, IntervalSet::of(w), bits);
            Rat lo = sides[s].sign > 0 ? sb.lo : -sb.hi, hi = sides[s].sign > 0 ? sb.hi : -sb.lo;
            if (!(cert.m < lo && hi < cert.M)) ok = false;
            sides[s].window = w;
            sides[s].slopes = sb;
        }
        if (!ok) continue;
        slope_ok_somewhere = true;

        // g(I-) = g(I+): shrink both windows onto the common image
        auto gd = [&](const Rat& x) { return eval(g, x, 64).mid.to_double(); };
        double jm[2][2];
        for (int s = 0; s < 2; ++s) {
            double a = gd(sides[s].window.lo), b = gd(sides[s].window.hi);
            jm[s][0] = std::min(a, b);
            jm[s][1] = std::max(a, b);
        }
        double ylo = std::max(jm[0][0], jm[1][0]), yhi = std::min(jm[0][1], jm[1][1]);
        if (!(ylo < yhi)) continue;
        for (int s = 0; s < 2; ++s) {
            Rat u = invert_approx(gd, sides[s].window, ylo, sides[s].sign);
            Rat v = invert_approx(gd, sides[s].window, yhi, sides[s].sign);
            sides[s].window = sides[s].sign > 0 ? Interval{u, v} : Interval{v, u};
            sides[s].slopes = slope_bounds(g, IntervalSet::of(sides[s].window), bits);
        }
        auto low_end = [&](int s) { return sides[s].sign > 0 ? sides[s].window.lo : sides[s].window.hi; };
        auto high_end = [&](int s) { return sides[s].sign > 0 ? sides[s].window.hi : sides[s].window.lo; };
        cert.image_mismatch = max((eval(g, low_end(0), bits) - eval(g, low_end(1), bits)).mag(),
                                  (eval(g, high_end(0), bits) - eval(g, high_end(1), bits)).mag());

        Rat d0 = density(f_set, IntervalSet::of(sides[0].window));
        Rat d1 = density(f_set, IntervalSet::of(sides[1].window));
        if (best_density < min(d0, d1)) {
            best_density = min(d0, d1);
            best_radius = r;
        }
        if (cert.density_threshold < d0 && cert.density_threshold < d1) {
            cert.density_minus = d0;
            cert.density_plus = d1;
            window_found = true;
        }
    }
    if (!slope_ok_somewhere)
        throw Error(ErrorKind::kPreconditionViolation, "no window around -1 and 1 keeps m < |g'| < M");
    if (!window_found)
        throw Error(ErrorKind::kDensityTooLow,
                    "best density " + best_density.str() + " (~" + std::to_string(best_density.to_double()) +
                        ") at radius " + best_radius.str() + ", required more than " +
                        cert.density_threshold.str() + " (~" +
                        std::to_string(cert.density_threshold.to_double()) + ")");
    cert.i_minus = sides[0].window;
    cert.i_plus = sides[1].window;
    for (Side& s : sides) s.comps = intersect(f_set, IntervalSet::of(s.window)).intervals();

    Rat lo = 0, hi = 1;
    if (admissible_pm(sides, hi, bits)) {
        lo = hi;
    } else {
        for (int i = 0; i < 30; ++i) {
            Rat mid = (lo + hi) / 2;
            if (admissible_pm(sides, mid, bits)) lo = mid; else hi = mid;
        }
    }
    cert.theta_sup = lo;
    if (cert.theta_sup.is_zero())
        throw Error(ErrorKind::kThetaTooLarge, "no positive angle keeps the slope conditions");

    const bool user = opt.theta_max.has_value();
    Rat theta_max = user ? *opt.theta_max : cert.theta_sup / 2;
    if (theta_max.sign() < 0) throw Error(ErrorKind::kInvalidParameter, "theta_max must be >= 0");
    if (user && cert.theta_sup < theta_max)
        throw Error(ErrorKind::kThetaTooLarge, "theta_max " + theta_max.str() +
                                                   " exceeds the admissible supremum " + cert.theta_sup.str());
    std::string last_failure;
    for (int attempt = 0; attempt < 48; ++attempt) {
        ScanAttempt a = attempt_scan(g, sides, theta_max, opt.grid, bits);
        if (a.failure.empty()) {
            cert.theta_max = theta_max;
            cert.witnesses = std::move(a.witnesses);
            cert.certified_g = a.certified;
            cert.certified_interval = a.certified;
            cert.center_pair = {-1, 1};
            cert.center_dq = dq(g, -1, 1, bits);
            return cert;
        }
        last_failure = a.failure;
        if (user) break;
        theta_max /= 2;
    }
    throw Error(ErrorKind::kThetaTooLarge,
                last_failure + "; admissible supremum " + cert.theta_sup.str() + " (~" +
                    std::to_string(cert.theta_sup.to_double()) + ")");
}

DQCertificate dq_interior(const PiecewiseFn& f, const IntervalSet& e, const std::pair<Rat, Rat>& pair,
                          const RotationOptions& opt) {
    const int bits = opt.precision_bits;
    Rat x1 = min(pair.first, pair.second), x2 = max(pair.first, pair.second);
    if (x1 == x2) throw Error(ErrorKind::kDiagonalExcluded, "pair lies on the diagonal");
    Enclosure q = dq(f, x1, x2, bits);
    Enclosure d1 = deriv_hull(f, x1, bits), d2 = deriv_hull(f, x2, bits);
    if (q.overlaps(d1) || q.overlaps(d2))
        throw Error(ErrorKind::kPairDegenerate,
                    "DQ_f(" + x1.str() + ", " + x2.str() + ") may equal f' at an endpoint");
    Enclosure f1 = eval(f, x1, bits + 16), f2 = eval(f, x2, bits + 16);

    const Rat a = (x2 - x1) / 2, b = (x1 + x2) / 2;
    const Rat c = trim(Enclosure::exact(-(f2.mid - f1.mid) / 2), bits + 16).mid;
    const Rat d = trim(Enclosure::exact(-(f1.mid + f2.mid) / 2), bits + 16).mid;
    PiecewiseFn g = affine_conjugate(f, a, b, c, d);
    IntervalSet big_f = affine_image(e, Rat(1) / a, -b / a);

    DQCertificate cert = rotation_scan(g, big_f, opt);
    cert.a = a;
    cert.b = b;
    cert.c = c;
    cert.d = d;
    cert.center_pair = {x1, x2};
    cert.center_dq = q;
    cert.certified_interval = {(cert.certified_g.lo - c) / a, (cert.certified_g.hi - c) / a};
    if (!(cert.certified_interval.lo < q.lo() && q.hi() < cert.certified_interval.hi))
        throw Error(ErrorKind::kSearchFailure, "certified interval misses DQ_f of the pair");
    return cert;
}

CertificateCheck verify_certificate(const PiecewiseFn& f, const IntervalSet& e, const DQCertificate& cert,
                                    int precision_bits) {
    CertificateCheck out;
    auto fail = [&](std::string msg) {
        out.ok = false;
        out.failures.push_back(std::move(msg));
    };
    const int bits = precision_bits;
    const bool identity = cert.a == Rat(1) && cert.b.is_zero() && cert.c.is_zero() && cert.d.is_zero();
    PiecewiseFn g = identity ? f : affine_conjugate(f, cert.a, cert.b, cert.c, cert.d);
    IntervalSet big_f = identity ? e : affine_image(e, Rat(1) / cert.a, -cert.b / cert.a);

    std::vector<Interval> cov;
    for (std::size_t i = 0; i < cert.witnesses.size(); ++i) {
        const Witness& w = cert.witnesses[i];
        const std::string tag = "witness #" + std::to_string(i) + " (theta " + w.theta.str() + "): ";
        if (!inside(big_f, w.c_minus) || !inside(big_f, w.c_plus)) fail(tag + "component outside F");
        if (!w.c_minus.contains(w.x_minus)) fail(tag + "x- outside its component");
        if (!w.c_plus.contains(w.bracket) || !w.bracket.contains(w.x_plus)) fail(tag + "bracket misplaced");
        if (!(w.c_minus.hi < w.c_plus.lo)) fail(tag + "components overlap");

        Trig tr = trig(w.theta, bits + 40);
        Enclosure base = phi(g, w.x_minus, tr.sn, tr.cs, bits + 40);
        Enclosure res = phi(g, w.x_plus, tr.sn, tr.cs, bits + 40) - base;
        if (w.residual_bound < res.mag()) fail(tag + "residual exceeds its recorded bound");
        if (residual_target() < w.residual_bound) fail(tag + "residual bound above 2^-60");
        out.max_residual = max(out.max_residual, res.mag());
        if (w.bracket.lo == w.bracket.hi) {
            if (!(res.is_exact() && res.mid.is_zero())) fail(tag + "degenerate bracket without exact crossing");
        } else {
            int sa = (phi(g, w.bracket.lo, tr.sn, tr.cs, bits + 40) - base).certified_sign();
            int sb = (phi(g, w.bracket.hi, tr.sn, tr.cs, bits + 40) - base).certified_sign();
            if (sa == 0 || sa != -sb) fail(tag + "no certified sign change on the bracket");
        }
        if (w.covered.lo < w.covered.hi) {
            Interval again = covered_range(g, w.c_minus, w.c_plus, bits);
            if (!again.contains(w.covered)) fail(tag + "covered range not reproduced");
            cov.push_back(w.covered);
        }
    }
    IntervalSet u = IntervalSet::normalize(cov);
    if (!inside(u, cert.certified_g)) fail("certified interval not covered by witness ranges");
    if (!(cert.certified_g.lo.sign() < 0 && cert.certified_g.hi.sign() > 0)) fail("certified interval misses 0");
    for (const auto& w : cert.witnesses) {
        Enclosure s = witness_slope(w.theta, bits);
        if (!(cert.certified_g.lo < s.lo() && s.hi() < cert.certified_g.hi))
            fail("witness slope at theta " + w.theta.str() + " outside the certified interval");
    }
    Interval mapped{(cert.certified_g.lo - cert.c) / cert.a, (cert.certified_g.hi - cert.c) / cert.a};
    if (cert.a.sign() < 0) std::swap(mapped.lo, mapped.hi);
    if (!(mapped == cert.certified_interval)) fail("f-coordinate interval is not the mapped g interval");
    if (!identity) {
        Enclosure q = dq(f, cert.center_pair.first, cert.center_pair.second, bits);
        if (!(cert.certified_interval.lo < q.lo() && q.hi() < cert.certified_interval.hi))
            fail("DQ_f of the center pair is not interior");
    }
    return out;
}

std::pair<Rat, Rat> find_admissible_pair(const PiecewiseFn& f, const IntervalSet& e, std::uint64_t seed,
                                         int radius_exp, const Rat& min_density, int attempts) {
    const Interval dom = f.domain();
    const std::vector<Rat> radius{Rat::pow2(-radius_exp)};
    auto dense = [&](const Rat& x) {
        return min_density <= density_profile(e, x, radius, dom).densities.back();
    };
    std::vector<Rat> pts = sample_points(e, static_cast<std::size_t>(2 * attempts), seed);
    int dense_pairs = 0;
    for (int i = 0; i + 1 < static_cast<int>(pts.size()); i += 2) {
        const Rat &x1 = pts[i], &x2 = pts[i + 1];
        if (x1 == x2 || !dense(x1) || !dense(x2)) continue;
        ++dense_pairs;
        Enclosure q = dq(f, x1, x2);
        if (q.overlaps(deriv_hull(f, x1)) || q.overlaps(deriv_hull(f, x2))) continue;
        return {min(x1, x2), max(x1, x2)};
    }
    // dense pairs existed but every quotient touched a derivative value (affine f, for one)
    if (dense_pairs > 0)
        throw Error(ErrorKind::kPairDegenerate, "all " + std::to_string(dense_pairs) +
                                                    " dense pairs have DQ equal to f' at an endpoint");
    throw Error(ErrorKind::kSearchFailure,
                "no admissible pair in " + std::to_string(attempts) + " seeded draws");
}

DQCloud dq_cloud(const PiecewiseFn& f, const IntervalSet& e, std::size_t n, std::uint64_t seed,
                 int precision_bits) {
    if (n == 0) throw Error(ErrorKind::kInvalidParameter, "dq_cloud needs n >= 1");
    DQCloud cloud;
    cloud.samples.reserve(n);
    for (const auto& [x1, x2] : sample_pairs(e, n, seed))
        cloud.samples.push_back(dq_sample(f, x1, x2, precision_bits));

    DQCloudSummary& s = cloud.summary;
    s.mvt = slope_bounds(f, IntervalSet::of(e.hull()), precision_bits);
    std::vector<Rat> mids;
    mids.reserve(n);
    s.min = cloud.samples.front().dq_value.lo();
    s.max = cloud.samples.front().dq_value.hi();
    for (const auto& smp : cloud.samples) {
        s.min = min(s.min, smp.dq_value.lo());
        s.max = max(s.max, smp.dq_value.hi());
        if (smp.dq_value.hi() < s.mvt.lo || s.mvt.hi < smp.dq_value.lo()) ++s.outside_mvt;
        mids.push_back(smp.dq_value.mid);
    }
    std::sort(mids.begin(), mids.end());
    s.largest_gap = {mids.front(), mids.front()};
    for (std::size_t i = 1; i < mids.size(); ++i)
        if (s.largest_gap.length() < mids[i] - mids[i - 1]) s.largest_gap = {mids[i - 1], mids[i]};
    return cloud;
}

std::vector<Rat> stern_brocot(std::size_t count, const std::vector<Rat>& skip) {
    std::vector<Rat> out;
    auto emit = [&](const Rat& r) {
        if (out.size() < count && std::find(skip.begin(), skip.end(), r) == skip.end()) out.push_back(r);
    };
    std::vector<Rat> row{Rat(0), Rat(1)};
    emit(row[0]);
    emit(row[1]);
    while (out.size() < count) {
        std::vector<Rat> next;
        next.reserve(row.size() * 2);
        for (std::size_t i = 0; i + 1 < row.size(); ++i) {
            Rat med(row[i].num() + row[i + 1].num(), row[i].den() + row[i + 1].den());
            next.push_back(row[i]);
            next.push_back(med);
            emit(med);
        }
        next.push_back(row.back());
        row = std::move(next);
    }
    return out;
}

OmissionReport no_interval_image(const PiecewiseFn& f, std::size_t count, std::size_t samples,
                                 std::uint64_t seed, int precision_bits) {
    if (count == 0) throw Error(ErrorKind::kInvalidParameter, "count must be >= 1");
    OmissionReport rep;
    for (const Piece& p : f.pieces())
        if (p.is_linear() && p.chord().is_zero()) rep.a.push_back(p.y_start);
    std::sort(rep.a.begin(), rep.a.end());
    rep.a.erase(std::unique(rep.a.begin(), rep.a.end()), rep.a.end());
    rep.b = stern_brocot(count, rep.a);

    std::vector<Rat> exact_points;
    for (const Rat& y : rep.b) {
        Preimage pre = preimage(f, y, precision_bits);
        if (!pre.plateaus.empty())
            throw Error(ErrorKind::kSearchFailure, "plateau at " + y.str() + " although it avoids A");
        for (auto& pt : pre.points) {
            if (pt.is_exact()) exact_points.push_back(pt.mid);
            rep.removed.push_back(std::move(pt));
        }
    }
    rep.f_set = minus_points(IntervalSet::of(f.domain()), exact_points);
    rep.f_measure = measure(rep.f_set);

    std::vector<Rat> sorted_b = rep.b;
    std::sort(sorted_b.begin(), sorted_b.end());
    std::vector<bool> hit(sorted_b.size(), false);
    if (samples > 0) {
        for (const Rat& x : sample_points(rep.f_set, samples, seed)) {
            bool excluded = false;
            for (const auto& r : rep.removed)
                if (r.contains(x)) excluded = true;
            if (excluded) continue;
            ++rep.samples;
            int bits = precision_bits;
            for (int tries = 0; tries < 4; ++tries, bits *= 2) {
                Enclosure y = eval(f, x, bits);
                auto it = std::lower_bound(sorted_b.begin(), sorted_b.end(), y.lo());
                if (it == sorted_b.end() || y.hi() < *it) break;
                if (tries == 3) {
                    rep.violations.push_back(x);
                    hit[static_cast<std::size_t>(it - sorted_b.begin())] = true;
                }
            }
        }
    }
    for (std::size_t i = 0; i < sorted_b.size(); ++i)
        if (!hit[i]) rep.omitted.push_back(sorted_b[i]);
    return rep;
}

Rat luzin_bound(const PiecewiseFn& f, const IntervalSet& e, int precision_bits) {
    Rat lam = measure(e);
    if (lam.is_zero()) return 0;
    SlopeBounds sb = slope_bounds(f, e, precision_bits);
    return max(sb.lo.abs(), sb.hi.abs()) * lam;
}

Rat staircase_luzin_bound(const StaircaseLedger& ledger, int k) {
    if (k < 0 || k > ledger.depth()) throw Error(ErrorKind::kInvalidParameter, "level outside the ledger");
    IntervalSet x = x_set(ledger.levels[k]);
    return deriv_g_bound(ledger, x, ledger.depth()) * measure(x);
}

}  // namespace dqlab
