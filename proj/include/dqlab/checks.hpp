#pragma once

#include "dqlab/piecewise.hpp"
#include "dqlab/serialize.hpp"
#include "dqlab/staircase.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dqlab {

struct CheckConfig {
    int depth = 10;
    std::uint64_t seed = 1;
    std::size_t samples = 100000;  // porcupine pairs
    int precision_bits = kDefaultPrecision;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string summary;   // one line
    std::string tolerance; // what was compared and how tightly
    double budget_seconds = 0;
    json data;             // exact values, no timings
};

/// Named checks in acceptance order.
const std::vector<std::string>& check_names();
double check_budget(const std::string& name);

/// Runs one check. Unexpected library errors are reported as a failure
/// with the error text rather than thrown.
CheckResult run_check(const std::string& name, const CheckConfig& cfg);

/// Random continuous piecewise function on [0, 1] with 1..5 pieces mixing
/// every shape, sheared arcs and flat pieces.
PiecewiseFn random_piecewise(std::mt19937_64& rng);

/// Random canonical set in [0, 1] with endpoints on a 1/64 grid.
IntervalSet random_set(std::mt19937_64& rng);

/// The instances the acceptance criteria are phrased on.
PiecewiseFn sin_half_unit();
PiecewiseFn two_slope_spline();

}  // namespace dqlab
