#include "ncbs/checks.hpp"

#include "ncbs/errors.hpp"
#include "ncbs/geometry.hpp"
#include "ncbs/oracles.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace ncbs::checks {

using expr::Bindings;
using expr::Expr;
using models::ModelKind;
using models::ModelSpec;

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    return true;
}

Expr random_expression(std::mt19937_64& rng, int max_depth, const std::string& var) {
    std::uniform_real_distribution<double> constant(0.5, 2.0);
    std::uniform_int_distribution<int> pick(0, 9);
    const Expr x = Expr::variable(var);
    if (max_depth <= 1 || pick(rng) < 2) return pick(rng) < 6 ? x : Expr::constant(constant(rng));

    auto child = [&](int d) { return random_expression(rng, d, var); };
    // Guarded argument c + u^2 uses three levels.
    auto guarded = [&]() {
        const Expr u = child(std::max(1, max_depth - 3));
        return Expr::constant(constant(rng)) + u * u;
    };
    switch (pick(rng)) {
    case 0: return child(max_depth - 1) + child(max_depth - 1);
    case 1: return child(max_depth - 1) - child(max_depth - 1);
    case 2: return child(max_depth - 1) * child(max_depth - 1);
    case 3: return child(max_depth - 1) / guarded();
    case 4: return expr::pow(child(max_depth - 1), std::uniform_int_distribution<unsigned>(0, 3)(rng));
    case 5: return -child(max_depth - 1);
    case 6: return expr::exp(child(max_depth - 1));
    case 7: return expr::ln(guarded());
    case 8: return expr::sqrt(guarded());
    default: return child(max_depth - 1) * x;
    }
}

double derivative_fd_error(int count, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> where(0.5, 2.0);
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < count;) {
        const Expr e = random_expression(rng, 5, "q");
        const Expr d = expr::differentiate(e, "q");
        std::vector<double> xs(points);
        for (auto& x : xs) x = where(rng);
        auto f = [&](double x) { return expr::evaluate(e, Bindings{{"q", x}}); };
        bool tame = true;
        double local = 0.0;
        try {
            for (double x : xs) {
                const double lo = f(x - h), mid = f(x), hi = f(x + h);
                if (std::abs(lo) > 1e3 || std::abs(mid) > 1e3 || std::abs(hi) > 1e3) {
                    tame = false;
                    break;
                }
                const double sym = expr::evaluate(d, Bindings{{"q", x}});
                local = std::max(local, std::abs(sym - (hi - lo) / (2.0 * h)) / (1.0 + std::abs(sym)));
            }
        } catch (const DomainError&) {
            tame = false;
        }
        if (!tame) continue;
        worst = std::max(worst, local);
        ++k;
    }
    return worst;
}

namespace {

geometry::Interval chart_domain(const ModelSpec& spec) {
    if (spec.chart == models::Chart::Log) return {std::log(spec.q_domain.lo), std::log(spec.q_domain.hi)};
    return spec.q_domain;
}

bool same_lines(const std::vector<Tridiagonal>& a, const std::vector<Tridiagonal>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!bitwise_equal(a[i].sub, b[i].sub) || !bitwise_equal(a[i].diag, b[i].diag) || !bitwise_equal(a[i].sup, b[i].sup))
            return false;
    return true;
}

}  // namespace

ReductionReport compare_reduction(const ModelSpec& reduced, const ModelSpec& base, const pricer::Instrument& inst,
                                  const pricer::Numerics& num, int points, std::uint64_t seed) {
    const auto sr = pricer::on_domain(reduced, inst, num);
    const auto sb = pricer::on_domain(base, inst, num);
    const auto gr = models::build_generator(sr);
    const auto gb = models::build_generator(sb);
    if (gr.dimension != gb.dimension) throw std::invalid_argument("compare_reduction: dimension mismatch");

    const auto xd = chart_domain(sb);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(xd.lo, xd.hi);
    std::uniform_real_distribution<double> uw(sb.w_domain.lo, sb.w_domain.hi);
    std::vector<std::pair<const Expr*, const Expr*>> pairs{{&gr.a2, &gb.a2}, {&gr.a1, &gb.a1}, {&gr.a0, &gb.a0}};
    if (gr.dimension == 2) {
        pairs.push_back({&gr.b2, &gb.b2});
        pairs.push_back({&gr.b1, &gb.b1});
    }
    ReductionReport out;
    for (int k = 0; k < points; ++k) {
        Bindings b{{gb.x_var, ux(rng)}};
        if (gb.dimension == 2) b.set(gb.w_var, uw(rng));
        for (const auto& [r, s] : pairs)
            out.max_coefficient_gap = std::max(out.max_coefficient_gap, std::abs(expr::evaluate(*r, b) - expr::evaluate(*s, b)));
    }
    if (gr.dimension == 1) {
        const auto mr = pricer::assemble_1d(reduced, inst, num).matrix;
        const auto mb = pricer::assemble_1d(base, inst, num).matrix;
        out.matrices_identical = bitwise_equal(mr.sub, mb.sub) && bitwise_equal(mr.diag, mb.diag) && bitwise_equal(mr.sup, mb.sup);
    } else {
        const auto orr = pricer::assemble_2d(reduced, inst, num);
        const auto ob = pricer::assemble_2d(base, inst, num);
        out.matrices_identical = same_lines(orr.q_lines, ob.q_lines) && same_lines(orr.w_lines, ob.w_lines);
    }
    return out;
}

double kinetic_asymmetry(const ModelSpec& spec, const pricer::Instrument& inst, const pricer::Numerics& num) {
    if (spec.chart != models::Chart::Price) throw std::invalid_argument("kinetic_asymmetry: price chart only");
    const auto s = pricer::on_domain(spec, inst, num);
    auto gen = models::build_generator(s);
    gen.a1 = gen.kinetic_a1;
    gen.a0 = Expr{};
    const auto grid = discretize::make_grid(models::Chart::Price, s.q_domain.lo, s.q_domain.hi, num.n);
    const auto op = discretize::assemble_1d(gen, grid, discretize::default_boundaries(inst.payoff, gen, grid));
    const double dq = grid.spacing();
    std::vector<double> weight(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        weight[i] = dq / expr::evaluate(gen.metric_factor, Bindings{{"q", grid.nodes[i]}});
    double worst = 0.0;
    for (std::size_t i = 1; i + 2 < grid.size(); ++i) {
        const double upper = weight[i] * op.matrix.sup[i];
        const double lower = weight[i + 1] * op.matrix.sub[i + 1];
        worst = std::max(worst, std::abs(upper - lower));
    }
    return worst;
}

double put_call_parity_gap(const ModelSpec& spec, const pricer::Instrument& inst, const pricer::Numerics& num) {
    auto call = inst;
    call.payoff.kind = PayoffKind::Call;
    auto put = inst;
    put.payoff.kind = PayoffKind::Put;
    const auto c = pricer::price(spec, call, num);
    const auto p = pricer::price(spec, put, num);
    const auto r = models::matched_rate(pricer::on_domain(spec, inst, num));
    const double rate = r ? *r : -expr::evaluate(c.generator.a0, Bindings{{c.generator.x_var, c.surface.grid.lo()}});
    const auto& g = c.surface.grid;
    const double lo = g.lo() + 0.25 * (g.hi() - g.lo());
    const double hi = g.hi() - 0.25 * (g.hi() - g.lo());
    const double forward_strike = inst.payoff.strike * std::exp(-rate * inst.T);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.nodes[i] < lo || g.nodes[i] > hi) continue;
        const double S = g.price_at(i);
        worst = std::max(worst, std::abs(c.surface.final_values()[i] - p.surface.final_values()[i] - (S - forward_strike)));
    }
    return worst;
}

namespace {

pricer::Instrument desk_instrument() {
    pricer::Instrument inst;
    inst.payoff = {PayoffKind::Call, 100.0};
    inst.S0 = 100.0;
    inst.w0 = 0.04;
    inst.T = 1.0;
    return inst;
}

ModelSpec bs(ModelKind kind, double r = 0.02) {
    ModelSpec s;
    s.kind = kind;
    s.sigma = 0.2;
    s.r = r;
    return s;
}

ModelSpec mg(ModelKind kind) {
    ModelSpec s;
    s.kind = kind;
    s.xi = 0.5;
    s.r = 0.02;
    return s;
}

CheckResult at_most(std::string name, double value, double threshold) {
    return {std::move(name), std::isfinite(value) && value <= threshold, value, threshold};
}

CheckResult at_least(std::string name, double value, double threshold) {
    return {std::move(name), std::isfinite(value) && value >= threshold, value, threshold};
}

double round_trip_gap(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> where(0.5, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Expr e = random_expression(rng, 5, "q");
        const Expr back = expr::parse(expr::to_string(e), {"q"});
        for (int j = 0; j < 10; ++j) {
            const Bindings b{{"q", where(rng)}};
            double a = 0.0;
            try {
                a = expr::evaluate(e, b);
            } catch (const DomainError&) {
                continue;
            }
            const double c = expr::evaluate(back, b);
            worst = std::max(worst, std::abs(a - c) / (1.0 + std::abs(a)));
        }
    }
    return worst;
}

double linearity_gap(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> where(0.5, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Expr e1 = random_expression(rng, 4, "q");
        const Expr e2 = random_expression(rng, 4, "q");
        const double a = where(rng);
        const Expr lhs = expr::differentiate(a * e1 + e2, "q");
        const Expr d1 = expr::differentiate(e1, "q");
        const Expr d2 = expr::differentiate(e2, "q");
        for (int j = 0; j < 10; ++j) {
            const Bindings b{{"q", where(rng)}};
            try {
                const double l = expr::evaluate(lhs, b);
                const double r = a * expr::evaluate(d1, b) + expr::evaluate(d2, b);
                worst = std::max(worst, std::abs(l - r) / (1.0 + std::abs(r)));
            } catch (const DomainError&) {
            }
        }
    }
    return worst;
}

double eta_expansion_gap() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const double xi = 0.5;
    const double eta = 0.7;
    const auto terms = geometry::eta_potential_terms(xi, eta);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double q = u(rng), w = u(rng), p = u(rng) - 1.25;
        const Bindings b{{"q", q}, {"w", w}};
        const double full = 0.5 * q * q * w * (p + eta * w) * (p + eta * w);
        const double split =
            0.5 * q * q * w * p * p + expr::evaluate(terms.linear_in_p, b) * p + expr::evaluate(terms.scalar, b);
        worst = std::max(worst, std::abs(full - split) / (1.0 + std::abs(full)));
    }
    return worst;
}

// Laplace-Beltrami tuple of the MG metric against a nested finite-difference
// application of the divergence form sqrt(g11 g22) d_a((g_aa / sqrt(g11 g22)) d_a u).
double mg_divergence_gap() {
    const double xi = 0.5;
    const Expr q = Expr::variable("q");
    const Expr w = Expr::variable("w");
    const geometry::DiagonalMetric2D m{w * q * q, Expr::constant(2.0 * xi * xi) * w * w, "q", "w", {50.0, 150.0}, {0.02, 0.1}};
    const auto lb = geometry::lb_coefficients_2d(m);

    auto g11 = [](double q, double w) { return q * q * w; };
    auto g22 = [&](double, double w) { return 2.0 * xi * xi * w * w; };
    auto root = [&](double q, double w) { return std::sqrt(g11(q, w) * g22(q, w)); };
    // u = exp(0.01 q + 3 w) + q^2 w
    auto u_q = [](double q, double w) { return 0.01 * std::exp(0.01 * q + 3.0 * w) + 2.0 * q * w; };
    auto u_w = [](double q, double w) { return 3.0 * std::exp(0.01 * q + 3.0 * w) + q * q; };
    auto u_qq = [](double q, double w) { return 1e-4 * std::exp(0.01 * q + 3.0 * w) + 2.0 * w; };
    auto u_ww = [](double q, double w) { return 9.0 * std::exp(0.01 * q + 3.0 * w); };

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uq(50.0, 150.0), uw(0.02, 0.1);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double a = uq(rng), c = uw(rng);
        const double hq = 1e-3, hw = 1e-5;
        auto fq = [&](double qq) { return g11(qq, c) / root(qq, c) * u_q(qq, c); };
        auto fw = [&](double ww) { return g22(a, ww) / root(a, ww) * u_w(a, ww); };
        const double fd = root(a, c) * ((fq(a + hq) - fq(a - hq)) / (2.0 * hq) + (fw(c + hw) - fw(c - hw)) / (2.0 * hw));
        const Bindings b{{"q", a}, {"w", c}};
        const double tuple = expr::evaluate(lb.A, b) * u_qq(a, c) + expr::evaluate(lb.B, b) * u_ww(a, c) +
                             expr::evaluate(lb.C, b) * u_q(a, c) + expr::evaluate(lb.D, b) * u_w(a, c);
        worst = std::max(worst, std::abs(fd - tuple) / std::abs(tuple));
    }
    return worst;
}

// BS1 generator applied to C(q) versus the log-chart generator applied to V(x) = C(e^x).
double chart_consistency_gap() {
    const Expr q = Expr::variable("q");
    const Expr C = expr::pow(expr::ln(q), 2) + 1e-4 * expr::pow(q, 3) + expr::sqrt(q);
    const Expr V = expr::substitute(C, "q", expr::exp(Expr::variable("x")));
    auto spec = bs(ModelKind::BS1);
    spec.q_domain = {10.0, 1000.0};
    const auto gq = models::build_generator(spec);
    spec.chart = models::Chart::Log;
    const auto gx = models::build_generator(spec);
    auto action = [](const models::GeneratorCoefficients& g, const Expr& f, double at) {
        const Bindings b{{g.x_var, at}};
        const Expr d1 = expr::differentiate(f, g.x_var);
        const Expr d2 = expr::differentiate(d1, g.x_var);
        return expr::evaluate(g.a2, b) * expr::evaluate(d2, b) + expr::evaluate(g.a1, b) * expr::evaluate(d1, b) +
               expr::evaluate(g.a0, b) * expr::evaluate(f, b);
    };
    double worst = 0.0;
    for (double s : {12.0, 50.0, 99.0, 150.0, 400.0, 900.0}) {
        const double lq = action(gq, C, s);
        const double lx = action(gx, V, std::log(s));
        worst = std::max(worst, std::abs(lq - lx) / std::abs(lq));
    }
    return worst;
}

// BS2 with matching: a2 = sigma^2 q^2 / 2, a1 = r q, a0 = -r.
double black_scholes_terms_gap() {
    auto spec = bs(ModelKind::BS2, 0.05);
    const auto g = models::build_generator(spec);
    double worst = 0.0;
    for (double q : {1.5, 20.0, 100.0, 700.0}) {
        const Bindings b{{"q", q}};
        worst = std::max(worst, std::abs(expr::evaluate(g.a2, b) - 0.02 * q * q) / (0.02 * q * q));
        worst = std::max(worst, std::abs(expr::evaluate(g.a1, b) - 0.05 * q) / (0.05 * q));
        worst = std::max(worst, std::abs(expr::evaluate(g.a0, b) + 0.05) / 0.05);
    }
    return worst;
}

models::GeneratorCoefficients constant_generator(double a2, double a1, double a0) {
    models::GeneratorCoefficients g;
    g.a2 = Expr::constant(a2);
    g.a1 = Expr::constant(a1);
    g.a0 = Expr::constant(a0);
    g.metric_factor = Expr::constant(1.0);
    return g;
}

double row_sum_gap() {
    const auto grid = discretize::make_grid(models::Chart::Price, 1.0, 3.0, 41);
    auto g = constant_generator(0.0, 0.0, 0.0);
    g.a2 = 0.02 * expr::pow(Expr::variable("q"), 2);
    const auto op = discretize::assemble_1d(g, grid, {});
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        worst = std::max(worst, std::abs(op.matrix.sub[i] + op.matrix.diag[i] + op.matrix.sup[i]));
    return worst;
}

double consistency_order() {
    const Expr q = Expr::variable("q");
    const Expr C = expr::exp(0.01 * q) + expr::ln(q);
    const auto g = models::build_generator(bs(ModelKind::BS1));
    const Expr exact = g.a2 * expr::differentiate(expr::differentiate(C, "q"), "q") + g.a1 * expr::differentiate(C, "q") + g.a0 * C;
    auto max_error = [&](std::size_t n) {
        const auto grid = discretize::make_grid(models::Chart::Price, 50.0, 150.0, n);
        const auto op = discretize::assemble_1d(g, grid, {});
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = expr::evaluate(C, Bindings{{"q", grid.nodes[i]}});
        const auto lu = discretize::apply(op, u);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i)
            worst = std::max(worst, std::abs(lu[i] - expr::evaluate(exact, Bindings{{"q", grid.nodes[i]}})));
        return worst;
    };
    return std::log2(max_error(51) / max_error(101));
}

double amplification_gap() {
    const std::size_t n = 65;
    const auto grid = discretize::make_grid(models::Chart::Price, 1.0, 2.0, n);
    const auto zero = discretize::Face{discretize::FaceKind::Dirichlet, [](double, double) { return 0.0; }, "0"};
    const auto op = discretize::assemble_1d(constant_generator(1.0, 0.0, 0.0), grid, {zero, zero, {}, {}});
    const double pi = std::acos(-1.0);
    const double h = grid.spacing();
    double worst = 0.0;
    for (int k : {1, 3, 10}) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(k * pi * static_cast<double>(i) / static_cast<double>(n - 1));
        const double s = std::sin(k * pi / (2.0 * static_cast<double>(n - 1)));
        const double lambda = 4.0 * s * s / (h * h);
        const double dt = 1e-3;
        const auto surf = solve::evolve_1d(op, u, {dt, 1, solve::Scheme::CrankNicolson, 0, {}});
        const double expect = (1.0 - 0.5 * lambda * dt) / (1.0 + 0.5 * lambda * dt);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (std::abs(u[i]) < 1e-3) continue;
            worst = std::max(worst, std::abs(surf.final_values()[i] / u[i] - expect));
        }
    }
    return worst;
}

// a2 = a1 = 0, a0 = -r: every interior node decays by the scheme's rational factor.
std::pair<double, double> pure_decay_gaps() {
    const double r = 0.05;
    const int steps = 100;
    const auto grid = discretize::make_grid(models::Chart::Price, 12.5, 800.0, 101);
    const auto gen = constant_generator(0.0, 0.0, -r);
    const Payoff payoff{PayoffKind::Call, 100.0};
    const auto op = discretize::assemble_1d(gen, grid, discretize::default_boundaries(payoff, gen, grid));
    const auto u0 = discretize::sample_payoff(payoff, grid);
    const auto surf = solve::evolve_1d(op, u0, {1.0, steps, solve::Scheme::CrankNicolson, 2, {}});
    const double z = r / steps;
    const double factor = std::pow(1.0 / (1.0 + 0.5 * z), 2) * std::pow((1.0 - 0.5 * z) / (1.0 + 0.5 * z), steps - 1);
    double to_factor = 0.0, to_exp = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (u0[i] == 0.0) {
            to_factor = std::max(to_factor, std::abs(surf.final_values()[i]));
            continue;
        }
        const double ratio = surf.final_values()[i] / u0[i];
        to_factor = std::max(to_factor, std::abs(ratio - factor));
        to_exp = std::max(to_exp, std::abs(ratio - std::exp(-r)));
    }
    return {to_factor, to_exp};
}

bool eta_zero_bitwise() {
    const auto inst = desk_instrument();
    pricer::Numerics num;
    num.n = 41;
    num.n_w = 12;
    num.steps = 20;
    auto eta = mg(ModelKind::NCMG_ETA);
    eta.eta = 0.0;
    const auto a = pricer::price(eta, inst, num);
    const auto b = pricer::price(mg(ModelKind::MG), inst, num);
    return bitwise_equal(a.surface.final_values(), b.surface.final_values());
}

double degenerate_second_axis_gap() {
    const Expr q = Expr::variable("q");
    models::GeneratorCoefficients g2;
    g2.dimension = 2;
    g2.a2 = 0.02 * q * q;
    g2.a1 = 0.02 * q;
    g2.b2 = Expr{};
    g2.b1 = Expr{};
    models::GeneratorCoefficients g1 = g2;
    g1.dimension = 1;
    const Payoff payoff{PayoffKind::Call, 100.0};
    const auto grid2 = discretize::make_grid_2d(12.5, 800.0, 81, 0.004, 0.4, 6);
    const auto op2 = discretize::assemble_2d(g2, grid2, discretize::default_boundaries(payoff, g2, grid2));
    const auto op1 = discretize::assemble_1d(g1, grid2.q, discretize::default_boundaries(payoff, g1, grid2.q));
    const solve::EvolveOptions opt{1.0, 50, solve::Scheme::CrankNicolson, 2, {}};
    const auto s2 = solve::evolve_2d(op2, discretize::sample_payoff(payoff, grid2), opt);
    const auto s1 = solve::evolve_1d(op1, discretize::sample_payoff(payoff, grid2.q), opt);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid2.w.size(); ++j)
        for (std::size_t i = 0; i < grid2.q.size(); ++i)
            worst = std::max(worst, std::abs(s2.final_values()[grid2.index(i, j)] - s1.final_values()[i]));
    return worst;
}

}  // namespace

std::vector<CheckResult> run_property_suite() {
    std::vector<CheckResult> out;
    const auto inst = desk_instrument();
    pricer::Numerics num;
    num.n = 401;
    num.steps = 400;
    pricer::Numerics num2d;
    num2d.n = 41;
    num2d.n_w = 12;

    out.push_back(at_most("expr.derivative_vs_finite_difference", derivative_fd_error(100, 10, 2024), 1e-6));
    out.push_back(at_most("expr.print_parse_round_trip", round_trip_gap(7), 1e-14));
    out.push_back(at_most("expr.derivative_linearity", linearity_gap(8), 1e-12));
    out.push_back(at_most("geometry.eta_expansion", eta_expansion_gap(), 1e-13));
    out.push_back(at_most("geometry.mg_divergence_form", mg_divergence_gap(), 1e-6));
    out.push_back(at_most("models.chart_consistency", chart_consistency_gap(), 1e-10));
    out.push_back(at_most("models.black_scholes_terms", black_scholes_terms_gap(), 1e-14));

    auto nc1 = bs(ModelKind::NCBS1);
    nc1.f = expr::parse("q/100", {"q"});
    auto nc2 = bs(ModelKind::NCBS2, 0.05);
    nc2.f = nc1.f;
    auto bs2_free = bs(ModelKind::BS2, 0.05);
    bs2_free.potential = Expr::constant(0.05);
    bs2_free.alpha = 0.0;
    auto bs1_free = bs(ModelKind::BS1);
    bs1_free.r.reset();
    bs1_free.potential = Expr::constant(0.05);
    auto nct = mg(ModelKind::NCMG_THETA);
    nct.f = nc1.f;
    nct.g = expr::parse("w", {"w"});
    auto nce = mg(ModelKind::NCMG_ETA);
    const std::vector<std::tuple<std::string, ModelSpec, ModelSpec, bool>> reductions{
        {"NCBS1(theta=0)=BS1", nc1, bs(ModelKind::BS1), false},
        {"NCBS2(theta=0)=BS2", nc2, bs(ModelKind::BS2, 0.05), false},
        {"BS2(alpha=0)=BS1", bs2_free, bs1_free, false},
        {"NCMG_THETA(theta=0)=MG", nct, mg(ModelKind::MG), true},
        {"NCMG_ETA(eta=0)=MG", nce, mg(ModelKind::MG), true},
    };
    for (const auto& [name, reduced, base, two] : reductions) {
        auto rs = reduced;
        rs.theta = 0.0;
        rs.eta = 0.0;
        const auto rep = compare_reduction(rs, base, inst, two ? num2d : num, 1000, 99);
        out.push_back(at_most("models.reduction." + name, rep.max_coefficient_gap, 1e-13));
        out.push_back({"discretize.identical_matrix." + name, rep.matrices_identical, rep.matrices_identical ? 1.0 : 0.0, 1.0});
    }

    auto nc_theta = nc1;
    nc_theta.f = expr::parse("q", {"q"});
    nc_theta.theta = 0.1;
    out.push_back(at_most("discretize.self_adjoint.BS1", kinetic_asymmetry(bs(ModelKind::BS1), inst, num), 1e-12));
    out.push_back(at_most("discretize.self_adjoint.NCBS1", kinetic_asymmetry(nc_theta, inst, num), 1e-12));
    out.push_back(at_most("discretize.row_sum", row_sum_gap(), 0.0));
    out.push_back(at_least("discretize.consistency_order", consistency_order(), 1.9));

    out.push_back(at_most("solve.amplification_factor", amplification_gap(), 1e-12));
    const auto [to_factor, to_exp] = pure_decay_gaps();
    out.push_back(at_most("solve.pure_decay_rational_factor", to_factor, 1e-12));
    out.push_back(at_most("solve.pure_decay_vs_exponential", to_exp, 1e-7));
    out.push_back(at_most("solve.degenerate_second_axis", degenerate_second_axis_gap(), 1e-10));
    const bool same = eta_zero_bitwise();
    out.push_back({"solve.eta_zero_bitwise", same, same ? 1.0 : 0.0, 1.0});

    auto log_num = num;
    auto bs1_log = bs(ModelKind::BS1);
    bs1_log.chart = models::Chart::Log;
    auto bs2_log = bs(ModelKind::BS2, 0.05);
    bs2_log.chart = models::Chart::Log;
    out.push_back(at_most("solve.put_call_parity.BS1", put_call_parity_gap(bs1_log, inst, log_num), 1e-2 * inst.payoff.strike));
    out.push_back(at_most("solve.put_call_parity.BS2", put_call_parity_gap(bs2_log, inst, log_num), 1e-2 * inst.payoff.strike));

    const double c = oracles::bs_closed_form(100.0, 100.0, 0.05, 0.2, 1.0, PayoffKind::Call);
    const double p = oracles::bs_closed_form(100.0, 100.0, 0.05, 0.2, 1.0, PayoffKind::Put);
    out.push_back(at_most("oracles.closed_form_parity", std::abs(c - p - (100.0 - 100.0 * std::exp(-0.05))), 1e-12));
    const double heat = oracles::heat_transform_price(100.0, inst.payoff, 0.05, 0.2, 1.0, 401, 400);
    out.push_back(at_most("oracles.heat_vs_closed_form", std::abs(heat - c) / c, 5e-3));
    const auto det = oracles::mc_gbm_price(100.0, 90.0, 0.05, 0.0, 1.0, 1000, 1, PayoffKind::Call);
    out.push_back(at_most("oracles.mc_deterministic_limit",
                          std::abs(det.price - std::exp(-0.05) * std::max(100.0 * std::exp(0.05) - 90.0, 0.0)), 1e-12));
    return out;
}

}  // namespace ncbs::checks
