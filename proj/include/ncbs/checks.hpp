#pragma once

// Property suite behind `ncbs check`, plus the measurement helpers it is
// built from.

#include "ncbs/expr.hpp"
#include "ncbs/models.hpp"
#include "ncbs/pricer.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ncbs::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

/// Every property, in a fixed order. Deterministic.
std::vector<CheckResult> run_property_suite();

/// Random tree of depth <= max_depth in `var`. ln, sqrt and division act on
/// c + u^2 with c in [0.5, 2], so they are defined everywhere.
expr::Expr random_expression(std::mt19937_64& rng, int max_depth, const std::string& var);

/// Max over `count` random expressions (depth <= 5) and `points` points in
/// [0.5, 2] of |symbolic - central difference (step 1e-5)| / (1 + |symbolic|).
/// Trees whose value exceeds 1e3 in magnitude near a sample point are redrawn.
double derivative_fd_error(int count, int points, std::uint64_t seed);

struct ReductionReport {
    double max_coefficient_gap = 0.0;
    bool matrices_identical = false;
};

/// Evaluates the generator coefficients of both models at `points` random
/// domain points and compares the assembled operators entry by entry.
ReductionReport compare_reduction(const models::ModelSpec& reduced, const models::ModelSpec& base,
                                  const pricer::Instrument& inst, const pricer::Numerics& num, int points,
                                  std::uint64_t seed);

/// max |W L - (W L)^T| over interior rows of the kinetic operator
/// c h d/dq (h d/dq), with W = diag(dq / h(q_i)). Price chart only.
double kinetic_asymmetry(const models::ModelSpec& spec, const pricer::Instrument& inst, const pricer::Numerics& num);

/// max |C - P - (S - K exp(-r T))| over nodes in the middle half of the
/// chart domain, with C and P solved on the same grid.
double put_call_parity_gap(const models::ModelSpec& spec, const pricer::Instrument& inst, const pricer::Numerics& num);

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ncbs::checks
