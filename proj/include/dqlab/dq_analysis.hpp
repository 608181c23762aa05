#pragma once

#include "dqlab/enclosure.hpp"
#include "dqlab/interval_set.hpp"
#include "dqlab/piecewise.hpp"
#include "dqlab/staircase.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace dqlab {

struct DQSample {
    Rat x1;
    Rat x2;
    Enclosure dq_value;
    Enclosure d1;  // f'(x1); the hull of both one-sided slopes at a corner
    Enclosure d2;
};

/// f'(x), or the hull of the two one-sided slopes when x is a corner.
Enclosure deriv_hull(const PiecewiseFn& f, const Rat& x, int precision_bits = kDefaultPrecision);

DQSample dq_sample(const PiecewiseFn& f, const Rat& x1, const Rat& x2,
                   int precision_bits = kDefaultPrecision);

// ---------------------------------------------------------------------------
// positive image

struct PositiveImageOptions {
    std::vector<Rat> radii = dyadic_radii(4, 20);
    Rat min_density = Rat(63, 64);  // required at the smallest radius
    int precision_bits = kDefaultPrecision;
};

struct PositiveImageReport {
    Rat x0;
    DensityProfile profile;
    Rat m;            // certified lower bound on |f'(x0)|
    int sign = 0;     // sign of f' on I
    Interval I;
    SlopeBounds slopes_on_I;
    Rat lower_bound;  // (m/2) lambda(E n I)
    MeasureBounds image;
};

/// Finds a density point x0 of e with f'(x0) != 0 and an interval I around it
/// on which |f'| >= m/2 with one sign; lower_bound = (m/2) lambda(e n I).
/// Throws kPreconditionViolation when f has a flat piece meeting e or
/// lambda(e) = 0, kSearchFailure when no candidate passes.
PositiveImageReport verify_positive_image(const PiecewiseFn& f, const IntervalSet& e,
                                          const PositiveImageOptions& opt = {});

// ---------------------------------------------------------------------------
// porcupine

struct PorcupineReport {
    std::size_t pairs = 0;
    std::size_t equality_hits = 0;
    Rat tolerance;
    std::vector<DQSample> hits;  // first few offenders
};

/// Samples n off-diagonal pairs of e x e and counts those whose difference
/// quotient may equal either endpoint derivative within 2^-80. Throws
/// kPreconditionViolation when f is linear on part of e.
PorcupineReport porcupine_check(const PiecewiseFn& f, const IntervalSet& e, std::size_t n,
                                std::uint64_t seed, int precision_bits = kDefaultPrecision);

// ---------------------------------------------------------------------------
// rotation scan

struct Witness {
    Rat theta;
    Rat x_minus;            // exact point of F-
    Rat x_plus;             // exact point inside bracket
    Interval bracket;       // certified sign change of phi - phi(x_minus), inside c_plus
    Rat residual_bound;     // |phi(x_plus) - phi(x_minus)| <= residual_bound
    Interval c_minus;       // components of F- and F+ the pair came from
    Interval c_plus;
    Interval covered;       // inner bound of DQ_g(c_minus x c_plus); lo > hi when empty
};

struct DQCertificate {
    // g(u) = f(a u + b) + c u + d and F = T1^-1(E); identity for a bare scan.
    Rat a = 1, b = 0, c = 0, d = 0;
    std::pair<Rat, Rat> center_pair{-1, 1};  // in f coordinates
    Enclosure center_dq;                     // DQ_f of the center pair
    Interval certified_interval;             // open, f coordinates
    Interval certified_g;                    // open, g coordinates, contains 0

    Interval i_minus, i_plus;
    Rat m, M;
    Rat density_threshold;
    Rat density_minus, density_plus;
    Rat image_mismatch;  // upper bound on the endpoint mismatch of g(I-) vs g(I+)
    Rat theta_sup;       // largest angle where the slope conditions hold (bisection)
    Rat theta_max;
    int grid = 0;
    std::vector<Witness> witnesses;
};

struct RotationOptions {
    std::optional<Rat> theta_max;  // default: half the admissible supremum, halved on failure
    int grid = 21;
    int precision_bits = kDefaultPrecision;
};

/// Certifies an open interval around 0 inside DQ_g(f_set). Needs g(+-1)
/// within 2^-64 of 0 and g'(+-1) bounded away from 0. Throws
/// kPreconditionViolation, kDensityTooLow (achieved vs required density) or
/// kThetaTooLarge (with the admissible supremum).
DQCertificate rotation_scan(const PiecewiseFn& g, const IntervalSet& f_set,
                            const RotationOptions& opt = {});

/// Normalizes the pair to (-1, 1), scans, and maps the certificate back.
/// Throws kPairDegenerate when DQ_f(x1, x2) may equal f'(x1) or f'(x2).
DQCertificate dq_interior(const PiecewiseFn& f, const IntervalSet& e, const std::pair<Rat, Rat>& pair,
                          const RotationOptions& opt = {});

struct CertificateCheck {
    bool ok = true;
    std::vector<std::string> failures;
    Rat max_residual = 0;
};

/// Re-derives every witness and the certified intervals from f and e alone.
CertificateCheck verify_certificate(const PiecewiseFn& f, const IntervalSet& e,
                                    const DQCertificate& cert,
                                    int precision_bits = kDefaultPrecision);

/// First seeded pair of points of e whose density at radius 2^-radius_exp is
/// at least min_density and whose difference quotient is certified away from
/// both endpoint derivatives. Throws kSearchFailure after `attempts` draws.
std::pair<Rat, Rat> find_admissible_pair(const PiecewiseFn& f, const IntervalSet& e,
                                         std::uint64_t seed, int radius_exp = 10,
                                         const Rat& min_density = Rat(63, 64),
                                         int attempts = 1000);

// ---------------------------------------------------------------------------
// clouds, omission, Luzin

struct DQCloudSummary {
    Rat min;
    Rat max;
    Interval largest_gap;   // between consecutive sorted midpoints
    SlopeBounds mvt;        // slope_bounds over hull(e)
    std::size_t outside_mvt = 0;
};

struct DQCloud {
    std::vector<DQSample> samples;
    DQCloudSummary summary;
};

DQCloud dq_cloud(const PiecewiseFn& f, const IntervalSet& e, std::size_t n, std::uint64_t seed,
                 int precision_bits = kDefaultPrecision);

/// 0, 1, 1/2, 1/3, 2/3, 1/4, 2/5, 3/5, 3/4, ... (Stern-Brocot rows).
std::vector<Rat> stern_brocot(std::size_t count, const std::vector<Rat>& skip = {});

struct OmissionReport {
    std::vector<Rat> a;                 // heights with positive-measure preimage
    std::vector<Rat> b;                 // dense values avoided
    IntervalSet f_set;                  // domain minus exact preimage points
    std::vector<Enclosure> removed;     // every preimage point of B, as enclosures
    Rat f_measure;
    std::size_t samples = 0;
    std::vector<Rat> omitted;           // members of B missed by every sampled image
    std::vector<Rat> violations;        // sample points whose image may hit B
};

OmissionReport no_interval_image(const PiecewiseFn& f, std::size_t count, std::size_t samples = 2000,
                                 std::uint64_t seed = 1, int precision_bits = kDefaultPrecision);

/// sup |f'| over e times lambda(e).
Rat luzin_bound(const PiecewiseFn& f, const IntervalSet& e, int precision_bits = kDefaultPrecision);
/// deriv_g_bound(X_k) * lambda(X_k), a bound for the limit function.
Rat staircase_luzin_bound(const StaircaseLedger& ledger, int k);

}  // namespace dqlab
