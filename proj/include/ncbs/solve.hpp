#pragma once

// Time integration of the discrete pricing equation.
//
// 1D: theta-method (implicit Euler or Crank-Nicolson). Crank-Nicolson starts
// with Rannacher smoothing: the first step is replaced by two implicit
// Euler half-steps so that the payoff kink does not pollute the order.
// 2D: Douglas dimension splitting with theta = 1/2 (q sweep, then w sweep),
// started the same way with two fully implicit half-steps.

#include "ncbs/discretize.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncbs::solve {

enum class Scheme { ImplicitEuler, CrankNicolson };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view s);

struct EvolveOptions {
    double maturity = 1.0;
    int steps = 100;
    Scheme scheme = Scheme::CrankNicolson;
    /// Implicit Euler half-steps replacing the first Crank-Nicolson step (0 or 2).
    int smoothing_half_steps = 2;
    /// Additional tau values to record; 0 and the maturity are always kept.
    std::vector<double> checkpoints;
};

struct PriceSurface {
    int dimension = 1;
    discretize::Grid1D grid;    ///< 1D grid, or the q axis in 2D
    discretize::Grid1D w_grid;  ///< 2D only
    std::vector<double> taus;   ///< sorted, starts at 0, ends at the maturity
    std::vector<std::vector<double>> values;  ///< one slice per tau (2D: q fastest)
    int steps = 0;
    Scheme scheme = Scheme::CrankNicolson;
    std::string boundary_summary;

    const std::vector<double>& final_values() const { return values.back(); }
};

/// Throws NumericalError (with the step index) on non-finite values.
PriceSurface evolve_1d(const discretize::BandedOperator1D& op, std::span<const double> payoff, const EvolveOptions& opt);
PriceSurface evolve_2d(const discretize::BandedOperator2D& op, std::span<const double> payoff, const EvolveOptions& opt);

/// Piecewise-linear (1D) or bilinear (2D) interpolation in the chart
/// coordinate of slice `slice` (default: maturity). `price` is the price
/// coordinate S; `w` is ignored in 1D. Throws std::out_of_range outside the grid.
double interpolate(const PriceSurface& surface, double price, double w = 0.0, std::optional<std::size_t> slice = {});

struct ConvergenceRow {
    std::size_t n = 0;
    int steps = 0;
    double price = 0.0;
    double reference = 0.0;
    double error = 0.0;
    double ratio = 0.0;  ///< previous error / this error (NaN on the first row)
    double order = 0.0;  ///< log2(ratio)
};

/// Runs `price(n, steps)` over the ladder. Errors are measured against
/// `reference` when given; otherwise against a Richardson extrapolation of
/// the two finest entries assuming second order.
std::vector<ConvergenceRow> convergence_study(const std::function<double(std::size_t, int)>& price,
                                              const std::vector<std::pair<std::size_t, int>>& ladder,
                                              std::optional<double> reference);

}  // namespace ncbs::solve
