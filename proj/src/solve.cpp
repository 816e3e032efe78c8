#include "ncbs/solve.hpp"

#include "ncbs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncbs::solve {

using discretize::BandedOperator1D;
using discretize::BandedOperator2D;
using discretize::Face;
using discretize::FaceKind;

std::string_view to_string(Scheme s) { return s == Scheme::ImplicitEuler ? "implicit-euler" : "crank-nicolson"; }

std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "implicit-euler") return Scheme::ImplicitEuler;
    if (s == "crank-nicolson") return Scheme::CrankNicolson;
    return std::nullopt;
}

namespace {

struct Substep {
    double dt;
    double theta;
    bool ends_step;  ///< true when this substep completes a full time step
};

std::vector<Substep> schedule(const EvolveOptions& opt) {
    if (opt.steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(opt.maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
    if (opt.smoothing_half_steps != 0 && opt.smoothing_half_steps != 2)
        throw std::invalid_argument("smoothing_half_steps must be 0 or 2");
    const double dt = opt.maturity / opt.steps;
    std::vector<Substep> out;
    int first = 0;
    if (opt.scheme == Scheme::CrankNicolson && opt.smoothing_half_steps == 2) {
        out.push_back({0.5 * dt, 1.0, false});
        out.push_back({0.5 * dt, 1.0, true});
        first = 1;
    }
    const double theta = opt.scheme == Scheme::CrankNicolson ? 0.5 : 1.0;
    for (int k = first; k < opt.steps; ++k) out.push_back({dt, theta, true});
    return out;
}

// Step indices (0..steps) at which a slice is stored.
std::vector<int> checkpoint_steps(const EvolveOptions& opt) {
    std::vector<int> ks{0, opt.steps};
    const double dt = opt.maturity / opt.steps;
    for (double c : opt.checkpoints) {
        if (!(c >= 0.0 && c <= opt.maturity)) throw std::invalid_argument("checkpoint outside [0, maturity]");
        ks.push_back(static_cast<int>(std::lround(c / dt)));
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

struct FaceState {
    FaceKind kind;
    double value;
};

FaceState face_state(const Face& f, double tau, double along) {
    if (f.kind == FaceKind::Dirichlet) return {f.kind, f.value(tau, along)};
    return {f.kind, 0.0};
}

// Solves (I - c L) y = rhs on the interior nodes of one grid line and fills
// the two boundary nodes of y from the faces. rhs boundary entries are ignored.
void implicit_solve(const Tridiagonal& L, double c, std::span<const double> rhs, FaceState lo, FaceState hi,
                    std::span<double> y) {
    const std::size_t n = L.size();
    const std::size_t m = n - 2;
    if (m < 2 && (lo.kind != FaceKind::Dirichlet || hi.kind != FaceKind::Dirichlet))
        throw std::invalid_argument("zero-second-derivative faces need at least 4 nodes per line");
    Tridiagonal a(m);
    std::vector<double> b(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k + 1;
        a.sub[k] = -c * L.sub[i];
        a.diag[k] = 1.0 - c * L.diag[i];
        a.sup[k] = -c * L.sup[i];
        b[k] = rhs[i];
    }
    // Lower face couples through a.sub[0], upper through a.sup[m-1].
    if (lo.kind == FaceKind::Dirichlet) {
        b[0] -= a.sub[0] * lo.value;
    } else {  // u0 = 2 u1 - u2
        a.diag[0] += 2.0 * a.sub[0];
        a.sup[0] -= a.sub[0];
    }
    a.sub[0] = 0.0;
    if (hi.kind == FaceKind::Dirichlet) {
        b[m - 1] -= a.sup[m - 1] * hi.value;
    } else {
        a.diag[m - 1] += 2.0 * a.sup[m - 1];
        a.sub[m - 1] -= a.sup[m - 1];
    }
    a.sup[m - 1] = 0.0;

    const auto x = tridiagonal_solve(a, b);
    std::copy(x.begin(), x.end(), y.begin() + 1);
    y[0] = lo.kind == FaceKind::Dirichlet ? lo.value : 2.0 * y[1] - y[2];
    y[n - 1] = hi.kind == FaceKind::Dirichlet ? hi.value : 2.0 * y[n - 2] - y[n - 3];
}

// (L u)_i on interior nodes of a line given by `at(i)`.
template <class At>
double line_apply(const Tridiagonal& L, std::size_t i, At at) {
    return L.sub[i] * at(i - 1) + L.diag[i] * at(i) + L.sup[i] * at(i + 1);
}

void check_finite(std::span<const double> u, int step) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i]))
            throw NumericalError("non-finite value at node " + std::to_string(i) + " after step " + std::to_string(step));
    }
}

[[noreturn]] void rethrow_at_step(const NumericalError& e, int step) {
    throw NumericalError(std::string(e.what()) + " in step " + std::to_string(step));
}

std::string summarize(const discretize::BoundaryCondition& bc, int dimension) {
    std::string s = "lower: " + bc.lower.description + "; upper: " + bc.upper.description;
    if (dimension == 2) s += "; w lower: " + bc.w_lower.description + "; w upper: " + bc.w_upper.description;
    return s;
}

}  // namespace

PriceSurface evolve_1d(const BandedOperator1D& op, std::span<const double> payoff, const EvolveOptions& opt) {
    const std::size_t n = op.grid.size();
    if (payoff.size() != n) throw std::invalid_argument("payoff does not match the grid");
    const auto subs = schedule(opt);
    const auto keep = checkpoint_steps(opt);
    const double dt = opt.maturity / opt.steps;

    PriceSurface out;
    out.dimension = 1;
    out.grid = op.grid;
    out.steps = opt.steps;
    out.scheme = opt.scheme;
    out.boundary_summary = summarize(op.bc, 1);

    std::vector<double> u(payoff.begin(), payoff.end());
    std::vector<double> rhs(n), next(n);
    out.taus.push_back(0.0);
    out.values.push_back(u);

    double tau = 0.0;
    int step = 0;
    for (const auto& s : subs) {
        const double tau_new = tau + s.dt;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double explicit_part = 0.0;
            if (s.theta < 1.0) explicit_part = (1.0 - s.theta) * s.dt * line_apply(op.matrix, i, [&](std::size_t k) { return u[k]; });
            rhs[i] = u[i] + explicit_part;
        }
        try {
            implicit_solve(op.matrix, s.theta * s.dt, rhs, face_state(op.bc.lower, tau_new, 0.0),
                           face_state(op.bc.upper, tau_new, 0.0), next);
        } catch (const NumericalError& e) {
            rethrow_at_step(e, step + 1);
        }
        u.swap(next);
        tau = tau_new;
        if (s.ends_step) {
            ++step;
            tau = step * dt;
            check_finite(u, step);
            if (std::binary_search(keep.begin(), keep.end(), step) && step > 0) {
                out.taus.push_back(step == opt.steps ? opt.maturity : tau);
                out.values.push_back(u);
            }
        }
    }
    return out;
}

PriceSurface evolve_2d(const BandedOperator2D& op, std::span<const double> payoff, const EvolveOptions& opt) {
    const auto& grid = op.grid;
    const std::size_t nq = grid.q.size();
    const std::size_t nw = grid.w.size();
    if (payoff.size() != grid.size()) throw std::invalid_argument("payoff does not match the grid");
    const auto subs = schedule(opt);
    const auto keep = checkpoint_steps(opt);
    const double dt_full = opt.maturity / opt.steps;

    PriceSurface out;
    out.dimension = 2;
    out.grid = grid.q;
    out.w_grid = grid.w;
    out.steps = opt.steps;
    out.scheme = opt.scheme;
    out.boundary_summary = summarize(op.bc, 2);

    std::vector<double> u(payoff.begin(), payoff.end());
    out.taus.push_back(0.0);
    out.values.push_back(u);

    std::vector<double> lq(grid.size(), 0.0), lw(grid.size(), 0.0), y1(grid.size(), 0.0), next(grid.size(), 0.0);
    std::vector<double> line_rhs(std::max(nq, nw)), line_out(std::max(nq, nw));

    double tau = 0.0;
    int step = 0;
    for (const auto& s : subs) {
        const double tau_new = tau + s.dt;
        const double c = s.theta * s.dt;

        for (std::size_t j = 1; j + 1 < nw; ++j) {
            for (std::size_t i = 1; i + 1 < nq; ++i) {
                lq[grid.index(i, j)] = line_apply(op.q_lines[j], i, [&](std::size_t k) { return u[grid.index(k, j)]; });
                lw[grid.index(i, j)] = line_apply(op.w_lines[i], j, [&](std::size_t k) { return u[grid.index(i, k)]; });
            }
        }

        try {
            // q sweep on interior w lines: (I - c Lq) Y1 = u + dt (Lq + Lw) u - c Lq u
            for (std::size_t j = 1; j + 1 < nw; ++j) {
                const double w = grid.w.nodes[j];
                for (std::size_t i = 1; i + 1 < nq; ++i) {
                    const std::size_t at = grid.index(i, j);
                    line_rhs[i] = u[at] + s.dt * (lq[at] + lw[at]) - c * lq[at];
                }
                implicit_solve(op.q_lines[j], c, std::span(line_rhs).first(nq), face_state(op.bc.lower, tau_new, w),
                               face_state(op.bc.upper, tau_new, w), std::span(line_out).first(nq));
                for (std::size_t i = 0; i < nq; ++i) y1[grid.index(i, j)] = line_out[i];
            }

            // w sweep on interior q lines: (I - c Lw) u_new = Y1 - c Lw u
            for (std::size_t i = 1; i + 1 < nq; ++i) {
                const double q = grid.q.nodes[i];
                for (std::size_t j = 1; j + 1 < nw; ++j) {
                    const std::size_t at = grid.index(i, j);
                    line_rhs[j] = y1[at] - c * lw[at];
                }
                implicit_solve(op.w_lines[i], c, std::span(line_rhs).first(nw), face_state(op.bc.w_lower, tau_new, q),
                               face_state(op.bc.w_upper, tau_new, q), std::span(line_out).first(nw));
                for (std::size_t j = 0; j < nw; ++j) next[grid.index(i, j)] = line_out[j];
            }
        } catch (const NumericalError& e) {
            rethrow_at_step(e, step + 1);
        }

        // q faces, corners included.
        for (std::size_t j = 0; j < nw; ++j) {
            const double w = grid.w.nodes[j];
            const auto lo = face_state(op.bc.lower, tau_new, w);
            const auto hi = face_state(op.bc.upper, tau_new, w);
            next[grid.index(0, j)] = lo.kind == FaceKind::Dirichlet ? lo.value
                                                                    : 2.0 * next[grid.index(1, j)] - next[grid.index(2, j)];
            next[grid.index(nq - 1, j)] = hi.kind == FaceKind::Dirichlet
                                              ? hi.value
                                              : 2.0 * next[grid.index(nq - 2, j)] - next[grid.index(nq - 3, j)];
        }

        u.swap(next);
        tau = tau_new;
        if (s.ends_step) {
            ++step;
            tau = step * dt_full;
            check_finite(u, step);
            if (std::binary_search(keep.begin(), keep.end(), step) && step > 0) {
                out.taus.push_back(step == opt.steps ? opt.maturity : tau);
                out.values.push_back(u);
            }
        }
    }
    return out;
}

namespace {

struct Bracket {
    std::size_t k;
    double t;
};

Bracket locate(const discretize::Grid1D& g, double c) {
    const double lo = g.lo();
    const double hi = g.hi();
    const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (!(c >= lo - slack && c <= hi + slack)) throw std::out_of_range("interpolation point outside the grid");
    c = std::clamp(c, lo, hi);
    const std::size_t n = g.size();
    auto k = static_cast<std::size_t>(std::floor((c - lo) / g.spacing()));
    k = std::min(k, n - 2);
    // Guard against rounding in the uniform-cell guess.
    while (k > 0 && c < g.nodes[k]) --k;
    while (k + 2 < n && c >= g.nodes[k + 1]) ++k;
    const double t = (c - g.nodes[k]) / (g.nodes[k + 1] - g.nodes[k]);
    return {k, t};
}

double chart_coordinate(const discretize::Grid1D& g, double price) {
    if (g.chart == models::Chart::Log) {
        if (!(price > 0.0)) throw std::out_of_range("log-chart interpolation needs a positive price");
        return std::log(price);
    }
    return price;
}

}  // namespace

double interpolate(const PriceSurface& surface, double price, double w, std::optional<std::size_t> slice) {
    const std::size_t s = slice.value_or(surface.values.size() - 1);
    if (s >= surface.values.size()) throw std::out_of_range("no such slice");
    const auto& v = surface.values[s];
    const auto bq = locate(surface.grid, chart_coordinate(surface.grid, price));
    auto at_q = [&](std::size_t j) {
        const std::size_t base = j * surface.grid.size();
        const double a = v[base + bq.k];
        const double b = v[base + bq.k + 1];
        return bq.t == 0.0 ? a : a + bq.t * (b - a);
    };
    if (surface.dimension == 1) return at_q(0);
    const auto bw = locate(surface.w_grid, w);
    const double lo = at_q(bw.k);
    const double hi = at_q(bw.k + 1);
    return bw.t == 0.0 ? lo : lo + bw.t * (hi - lo);
}

std::vector<ConvergenceRow> convergence_study(const std::function<double(std::size_t, int)>& price,
                                              const std::vector<std::pair<std::size_t, int>>& ladder,
                                              std::optional<double> reference) {
    if (ladder.empty()) return {};
    if (!reference && ladder.size() < 2) throw std::invalid_argument("Richardson reference needs two ladder entries");
    std::vector<ConvergenceRow> rows;
    for (const auto& [n, steps] : ladder) rows.push_back({n, steps, price(n, steps), 0.0, 0.0, 0.0, 0.0});
    double ref = 0.0;
    if (reference) {
        ref = *reference;
    } else {
        const double fine = rows.back().price;
        const double coarse = rows[rows.size() - 2].price;
        ref = fine + (fine - coarse) / 3.0;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        rows[k].reference = ref;
        rows[k].error = std::abs(rows[k].price - ref);
        rows[k].ratio = k == 0 ? nan : rows[k - 1].error / rows[k].error;
        rows[k].order = k == 0 ? nan : std::log2(rows[k].ratio);
    }
    return rows;
}

}  // namespace ncbs::solve
