#pragma once

#include "dqlab/enclosure.hpp"
#include "dqlab/interval_set.hpp"
#include "dqlab/piecewise.hpp"

#include <array>
#include <vector>

namespace dqlab {

struct Rect {
    Interval x;
    Interval y;

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// How the template's gaps scale when a rectangle is refined.
///  kPaperLedger: each level-k rectangle loses absolute width v_k, so the
///    removed mass at step k is 2^(k+1) v_k and X_k tends to 1/4.
///  kLiteralAffine: the unit template is mapped verbatim, so each rectangle
///    loses 2 v_k of its own width.
enum class GapConvention { kPaperLedger, kLiteralAffine };

const char* to_string(GapConvention c);
GapConvention parse_gap_convention(const std::string& s);  // "paper-ledger" | "literal-affine"

/// v_k = 2^-(2k+3).
Rat v_schedule(int k);

struct Template {
    Rat v;
    std::array<Rect, 2> rects;
    std::array<Piece, 3> connectors;  // COS_FULL, SIN_HALF, COS_HALF, left to right
};

/// The unit-square template for gap parameter v in (0, 1/6).
Template build_template(const Rat& v);

struct Level {
    int k = 0;
    std::vector<Rect> rects;       // 2^(k+1), sorted by x
    std::vector<Piece> connectors; // created at this level, sorted by x
    Rat v;  // gap parameter consumed by the step k -> k+1 (level 0 also uses it for F_0)
    Rat h;  // tamping factor for the step k -> k+1
    Rat s;  // common rectangle width
    Rat t;  // common rectangle height
};

struct StaircaseLedger {
    GapConvention convention = GapConvention::kPaperLedger;
    std::vector<Level> levels;
    std::vector<Rat> x_measures;        // lambda(X_k), exact
    std::vector<Rat> y_measure_bounds;  // 2^(k+1) t_k >= lambda(Y_k)
    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

/// Total width removed from one rectangle of width s by a refinement step.
Rat gap_width(GapConvention c, const Rat& v, const Rat& s);

/// Largest power of 1/2, at most min(1/2, h_prev / 2), for which every
/// connector made by refining an s x t rectangle has slope < 1/(k+1). The
/// steepest such connector is the right COS_HALF with slope 4 pi h t / (3G).
Rat choose_h(int k, const Rat& s, const Rat& t, const Rat& v,
             GapConvention c = GapConvention::kPaperLedger, const Rat& h_prev = 1);

/// Replaces every rectangle of `level` by its tamped template copy.
/// Throws kInvalidParameter when the gap would swallow the rectangle.
Level refine(const Level& level, GapConvention c);

/// Levels 0..depth with their measure ledgers. Every child rectangle is
/// checked to sit inside its parent.
StaircaseLedger build_ledger(int depth, GapConvention c = GapConvention::kPaperLedger);

IntervalSet x_set(const Level& level);
IntervalSet y_set(const Level& level);

/// Continuous piecewise function equal to g off X_depth, and to the bottom
/// edge of each level-depth rectangle on X_depth.
PiecewiseFn truncation(const StaircaseLedger& ledger, int depth);

/// Enclosure of g(x) valid for the limit function: exact-formula connector
/// values where some level <= depth decides x, otherwise the y-range of the
/// level-depth rectangle above x.
Enclosure eval_g(const StaircaseLedger& ledger, const Rat& x, int depth,
                 int precision_bits = kDefaultPrecision);

/// Upper bound on |g'| over region: closed-form slopes of every connector at
/// levels <= depth that overlaps region, and 1/(depth+1) for the part of
/// region inside X_depth (all deeper connectors are tamped below it).
Rat deriv_g_bound(const StaircaseLedger& ledger, const IntervalSet& region, int depth);

/// Upper bound on the horizontal extent of {g = t}: s_depth for t in [0, 1],
/// 0 otherwise.
Rat level_set_check(const StaircaseLedger& ledger, const Rat& t, int depth);

/// Bounds on lambda(X_infinity) from the ledger's deepest level. Exact under
/// kPaperLedger; under kLiteralAffine the tail product prod (1 - 2 v_k) is
/// bracketed by 1 - sum 2 v_k and its first factor.
struct LimitBounds {
    Rat lo;
    Rat hi;
};
LimitBounds x_limit_bounds(const StaircaseLedger& ledger);

}  // namespace dqlab
