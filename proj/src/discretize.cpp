#include "ncbs/discretize.hpp"

#include "ncbs/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ncbs::discretize {

using expr::Bindings;
using expr::Expr;

double Grid1D::price_at(std::size_t i) const { return chart == Chart::Log ? std::exp(nodes[i]) : nodes[i]; }

Grid1D make_grid(Chart chart, double lo, double hi, std::size_t n) {
    if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes, got " + std::to_string(n));
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("grid bounds must satisfy lo < hi");
    if (chart == Chart::Price && !(lo > 0.0)) throw std::invalid_argument("price-chart grid requires lo > 0");
    Grid1D g;
    g.chart = chart;
    g.nodes.resize(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.nodes[i] = lo + h * static_cast<double>(i);
    g.nodes.back() = hi;
    return g;
}

Grid2D make_grid_2d(double q_lo, double q_hi, std::size_t n_q, double w_lo, double w_hi, std::size_t n_w) {
    if (!(w_lo > 0.0)) throw std::invalid_argument("variance axis requires w_min > 0");
    return {make_grid(Chart::Price, q_lo, q_hi, n_q), make_grid(Chart::Price, w_lo, w_hi, n_w)};
}

namespace {

double eval_at(const Expr& e, const Bindings& b, const char* name, const std::string& where) {
    double v = 0.0;
    try {
        v = expr::evaluate(e, b);
    } catch (const DomainError& err) {
        throw NumericalError(std::string("coefficient ") + name + " fails at " + where + ": " + err.what());
    }
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite coefficient ") + name + " at " + where);
    return v;
}

std::string node_label(const std::string& var, double x) {
    std::ostringstream os;
    os << var << "=" << x;
    return os.str();
}

void fill_row(Tridiagonal& m, std::size_t i, double second, double first, double zeroth, double h) {
    const double d2 = second / (h * h);
    const double d1 = first / (2.0 * h);
    m.sub[i] = d2 - d1;
    m.diag[i] = -2.0 * d2 + zeroth;
    m.sup[i] = d2 + d1;
}

double line_peclet(const Tridiagonal& m) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < m.size(); ++i) {
        const double diffusion = m.sub[i] + m.sup[i];
        const double advection = std::abs(m.sup[i] - m.sub[i]);
        if (advection == 0.0) continue;
        worst = std::max(worst, diffusion > 0.0 ? advection / diffusion : INFINITY);
    }
    return worst;
}

}  // namespace

BandedOperator1D assemble_1d(const models::GeneratorCoefficients& gen, const Grid1D& grid, BoundaryCondition bc) {
    if (gen.dimension != 1) throw std::invalid_argument("assemble_1d needs a one-factor generator");
    const std::size_t n = grid.size();
    if (n < 3) throw std::invalid_argument("grid too small");
    BandedOperator1D op{grid, Tridiagonal(n), std::move(bc)};
    const double h = grid.spacing();
    Bindings b;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = grid.nodes[i];
        b.set(gen.x_var, x);
        const std::string where = node_label(gen.x_var, x);
        fill_row(op.matrix, i, eval_at(gen.a2, b, "a2", where), eval_at(gen.a1, b, "a1", where),
                 eval_at(gen.a0, b, "a0", where), h);
    }
    return op;
}

BandedOperator2D assemble_2d(const models::GeneratorCoefficients& gen, const Grid2D& grid, BoundaryCondition bc) {
    if (gen.dimension != 2) throw std::invalid_argument("assemble_2d needs a two-factor generator");
    const std::size_t nq = grid.q.size();
    const std::size_t nw = grid.w.size();
    if (nq < 3 || nw < 4) throw std::invalid_argument("2D grid needs at least 3 q nodes and 4 w nodes");
    BandedOperator2D op{grid, std::vector<Tridiagonal>(nw, Tridiagonal(nq)), std::vector<Tridiagonal>(nq, Tridiagonal(nw)),
                        std::move(bc)};
    const double hq = grid.q.spacing();
    const double hw = grid.w.spacing();
    Bindings b;
    for (std::size_t j = 0; j < nw; ++j) {
        for (std::size_t i = 0; i < nq; ++i) {
            const double q = grid.q.nodes[i];
            const double w = grid.w.nodes[j];
            b.set(gen.x_var, q).set(gen.w_var, w);
            const std::string where = node_label(gen.x_var, q) + ", " + node_label(gen.w_var, w);
            const double half_a0 = 0.5 * eval_at(gen.a0, b, "a0", where);
            if (i > 0 && i + 1 < nq)
                fill_row(op.q_lines[j], i, eval_at(gen.a2, b, "a2", where), eval_at(gen.a1, b, "a1", where), half_a0, hq);
            if (j > 0 && j + 1 < nw)
                fill_row(op.w_lines[i], j, eval_at(gen.b2, b, "b2", where), eval_at(gen.b1, b, "b1", where), half_a0, hw);
        }
    }
    return op;
}

namespace {

Face dirichlet(FaceValue fn, std::string description) {
    return Face{FaceKind::Dirichlet, std::move(fn), std::move(description)};
}

Face linear_extrapolation() { return Face{FaceKind::ZeroSecondDerivative, nullptr, "zero second derivative"}; }

// Pair of Dirichlet faces for a payoff; `rate(along)` gives the discount
// rate at the lower/upper face node.
std::pair<Face, Face> payoff_faces(const Payoff& payoff, double s_min, double s_max,
                                   std::function<double(double)> rate_lo, std::function<double(double)> rate_hi) {
    const double K = payoff.strike;
    if (payoff.kind == PayoffKind::Call) {
        return {dirichlet([](double, double) { return 0.0; }, "call: 0"),
                dirichlet([=](double tau, double along) { return s_max - K * std::exp(-rate_hi(along) * tau); },
                          "call: S_max - K exp(-r tau)")};
    }
    return {dirichlet([=](double tau, double along) { return K * std::exp(-rate_lo(along) * tau) - s_min; },
                      "put: K exp(-r tau) - S_min"),
            dirichlet([](double, double) { return 0.0; }, "put: 0")};
}

}  // namespace

BoundaryCondition default_boundaries(const Payoff& payoff, const models::GeneratorCoefficients& gen, const Grid1D& grid) {
    if (gen.dimension != 1) throw std::invalid_argument("one-factor boundaries need a one-factor generator");
    auto rate_at = [&](double x) {
        return -eval_at(gen.a0, Bindings{{gen.x_var, x}}, "a0", node_label(gen.x_var, x));
    };
    const double r_lo = rate_at(grid.lo());
    const double r_hi = rate_at(grid.hi());
    auto [lo, hi] = payoff_faces(
        payoff, grid.price_at(0), grid.price_at(grid.size() - 1), [r_lo](double) { return r_lo; },
        [r_hi](double) { return r_hi; });
    return {std::move(lo), std::move(hi), linear_extrapolation(), linear_extrapolation()};
}

BoundaryCondition default_boundaries(const Payoff& payoff, const models::GeneratorCoefficients& gen, const Grid2D& grid) {
    if (gen.dimension != 2) throw std::invalid_argument("two-factor boundaries need a two-factor generator");
    auto rate_fn = [gen](double q) {
        return [gen, q](double w) {
            Bindings b{{gen.x_var, q}, {gen.w_var, w}};
            return -eval_at(gen.a0, b, "a0", node_label(gen.x_var, q) + ", " + node_label(gen.w_var, w));
        };
    };
    auto [lo, hi] = payoff_faces(payoff, grid.q.lo(), grid.q.hi(), rate_fn(grid.q.lo()), rate_fn(grid.q.hi()));
    return {std::move(lo), std::move(hi), linear_extrapolation(), linear_extrapolation()};
}

std::vector<double> sample_payoff(const Payoff& payoff, const Grid1D& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = payoff(grid.price_at(i));
    return v;
}

std::vector<double> sample_payoff(const Payoff& payoff, const Grid2D& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.w.size(); ++j)
        for (std::size_t i = 0; i < grid.q.size(); ++i) v[grid.index(i, j)] = payoff(grid.q.nodes[i]);
    return v;
}

std::vector<double> apply(const BandedOperator1D& op, std::span<const double> u) {
    auto out = multiply(op.matrix, u);
    out.front() = 0.0;
    out.back() = 0.0;
    return out;
}

double max_cell_peclet(const BandedOperator1D& op) { return line_peclet(op.matrix); }

double max_cell_peclet(const BandedOperator2D& op) {
    double worst = 0.0;
    for (const auto& m : op.q_lines) worst = std::max(worst, line_peclet(m));
    for (const auto& m : op.w_lines) worst = std::max(worst, line_peclet(m));
    return worst;
}

}  // namespace ncbs::discretize
