#pragma once

// Uniform grids, boundary conditions and central-difference assembly of
// generator coefficients into tridiagonal operators.

#include "ncbs/models.hpp"
#include "ncbs/payoff.hpp"
#include "ncbs/tridiagonal.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ncbs::discretize {

using models::Chart;

struct Grid1D {
    Chart chart = Chart::Price;
    std::vector<double> nodes;  ///< chart coordinate (q, or x = ln q)

    std::size_t size() const noexcept { return nodes.size(); }
    double lo() const { return nodes.front(); }
    double hi() const { return nodes.back(); }
    double spacing() const { return (hi() - lo()) / static_cast<double>(size() - 1); }
    /// Price coordinate of node i.
    double price_at(std::size_t i) const;
};

/// Uniform grid on [lo, hi] in the chart coordinate; n >= 3, and lo > 0 in
/// the price chart. Throws std::invalid_argument otherwise.
Grid1D make_grid(Chart chart, double lo, double hi, std::size_t n);

struct Grid2D {
    Grid1D q;
    Grid1D w;

    std::size_t size() const noexcept { return q.size() * w.size(); }
    /// Flat index, q fastest.
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * q.size() + i; }
};

Grid2D make_grid_2d(double q_lo, double q_hi, std::size_t n_q, double w_lo, double w_hi, std::size_t n_w);

enum class FaceKind { Dirichlet, ZeroSecondDerivative };

/// Boundary value as a function of tau and the coordinate along the face
/// (w for the q faces of a 2D grid; unused in 1D).
using FaceValue = std::function<double(double tau, double along)>;

struct Face {
    FaceKind kind = FaceKind::ZeroSecondDerivative;
    FaceValue value;
    std::string description;
};

struct BoundaryCondition {
    Face lower;    ///< q (or x) minimum
    Face upper;    ///< q (or x) maximum
    Face w_lower;  ///< 2D only
    Face w_upper;  ///< 2D only
};

struct BandedOperator1D {
    Grid1D grid;
    Tridiagonal matrix;  ///< interior rows only; rows 0 and n-1 are zero
    BoundaryCondition bc;
};

/// Per-axis operators of a dimension-split 2D generator. q_lines[j] acts
/// along q at w index j; w_lines[i] along w at q index i. a0 is shared
/// evenly between the two families.
struct BandedOperator2D {
    Grid2D grid;
    std::vector<Tridiagonal> q_lines;
    std::vector<Tridiagonal> w_lines;
    BoundaryCondition bc;
};

/// Throws NumericalError on a non-finite coefficient (naming the node) and
/// std::invalid_argument on a grid that is too small or a 2D generator.
BandedOperator1D assemble_1d(const models::GeneratorCoefficients& gen, const Grid1D& grid, BoundaryCondition bc);
BandedOperator2D assemble_2d(const models::GeneratorCoefficients& gen, const Grid2D& grid, BoundaryCondition bc);

/// Call: 0 at the lower face, S_max - K e^{-r tau} at the upper face; put
/// mirrored. r is the rate implied by -a0 at the face node. The w faces of
/// a 2D grid use zero second derivative.
BoundaryCondition default_boundaries(const Payoff& payoff, const models::GeneratorCoefficients& gen, const Grid1D& grid);
BoundaryCondition default_boundaries(const Payoff& payoff, const models::GeneratorCoefficients& gen, const Grid2D& grid);

/// Payoff sampled at the grid nodes (price coordinates).
std::vector<double> sample_payoff(const Payoff& payoff, const Grid1D& grid);
std::vector<double> sample_payoff(const Payoff& payoff, const Grid2D& grid);

/// (L u) on interior nodes; boundary entries are zero.
std::vector<double> apply(const BandedOperator1D& op, std::span<const double> u);

/// max |a1| dx / (2 a2) over interior nodes of every line.
double max_cell_peclet(const BandedOperator1D& op);
double max_cell_peclet(const BandedOperator2D& op);

}  // namespace ncbs::discretize
