#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbs/checks.hpp"
#include "ncbs/errors.hpp"
#include "ncbs/oracles.hpp"
#include "ncbs/pricer.hpp"
#include "ncbs/solve.hpp"
#include "ncbs/tridiagonal.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ncbs;
using discretize::BoundaryCondition;
using discretize::Face;
using discretize::FaceKind;
using expr::Expr;

namespace {

Face dirichlet(double v) { return {FaceKind::Dirichlet, [v](double, double) { return v; }, "const"}; }

models::GeneratorCoefficients constant(double a2, double a1, double a0) {
    models::GeneratorCoefficients g;
    g.a2 = Expr::constant(a2);
    g.a1 = Expr::constant(a1);
    g.a0 = Expr::constant(a0);
    return g;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(const Tridiagonal& t, std::vector<double> b) {
    const std::size_t n = t.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = t.diag[i];
        if (i > 0) a[i][i - 1] = t.sub[i];
        if (i + 1 < n) a[i][i + 1] = t.sup[i];
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

models::ModelSpec bs(models::ModelKind k, std::optional<double> r = std::nullopt) {
    models::ModelSpec s;
    s.kind = k;
    s.sigma = 0.2;
    s.r = r;
    s.chart = models::Chart::Log;
    return s;
}

pricer::Numerics numerics(std::size_t n, int steps, models::Chart) {
    pricer::Numerics num;
    num.n = n;
    num.steps = steps;
    return num;
}

}  // namespace

TEST_CASE("tridiagonal solves") {
    Tridiagonal id(4);
    for (auto& d : id.diag) d = 1.0;
    const std::vector<double> b{1, 2, 3, 4};
    CHECK(tridiagonal_solve(id, b) == b);

    Tridiagonal t(3);
    t.diag = {2, 2, 2};
    t.sub = {0, -1, -1};
    t.sup = {-1, -1, 0};
    const auto x = tridiagonal_solve(t, std::vector<double>{1, 0, 1});
    for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + trial;
        Tridiagonal a(n);
        std::vector<double> rhs(n);
        const bool dominant = trial % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            a.sub[i] = i > 0 ? u(rng) : 0.0;
            a.sup[i] = i + 1 < n ? u(rng) : 0.0;
            a.diag[i] = dominant ? 2.5 + u(rng) : u(rng);
            rhs[i] = u(rng);
        }
        const auto got = tridiagonal_solve(a, rhs);
        const auto want = dense_solve(a, rhs);
        const auto back = multiply(a, got);
        double resid = 0.0, gap = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid = std::max(resid, std::abs(back[i] - rhs[i]));
            gap = std::max(gap, std::abs(got[i] - want[i]));
            scale = std::max(scale, std::abs(want[i]));
        }
        CHECK(resid < 1e-12 * scale * 10);
        CHECK(gap < 1e-9 * scale);
    }

    Tridiagonal singular(3);
    singular.diag = {1, 1, 0};
    singular.sub = {0, 1, 0};
    singular.sup = {1, 0, 0};
    CHECK_THROWS_AS(tridiagonal_solve(singular, std::vector<double>{1, 1, 1}), NumericalError);

    // Zero leading pivot: solvable only with row exchanges.
    Tridiagonal pivot(3);
    pivot.diag = {0, 0, 1};
    pivot.sub = {0, 1, 1};
    pivot.sup = {1, 1, 0};
    const auto px = tridiagonal_solve(pivot, std::vector<double>{1, 2, 3});
    const auto pb = multiply(pivot, px);
    CHECK(pb[0] == doctest::Approx(1.0));
    CHECK(pb[1] == doctest::Approx(2.0));
    CHECK(pb[2] == doctest::Approx(3.0));
}

TEST_CASE("pure decay") {
    // a2 = a1 = 0, a0 = -r: every node decays like exp(-r tau).
    const double r = 0.05;
    const auto grid = discretize::make_grid(models::Chart::Price, 1.0, 2.0, 11);
    auto op = discretize::assemble_1d(constant(0.0, 0.0, -r), grid,
                                      {dirichlet(std::exp(-r)), dirichlet(std::exp(-r)), {}, {}});
    const std::vector<double> ones(11, 1.0);
    solve::EvolveOptions opt;
    opt.maturity = 1.0;
    opt.steps = 100;
    const auto s = solve::evolve_1d(op, ones, opt);
    const double z = r * 0.01;
    const double discrete = std::pow(1.0 + z / 2, -2) * std::pow((1.0 - z / 2) / (1.0 + z / 2), 99);
    for (std::size_t i = 1; i < 10; ++i) {
        CHECK(std::abs(s.final_values()[i] - discrete) < 1e-12);
        CHECK(std::abs(s.final_values()[i] - std::exp(-r)) < 1e-7);
    }
}

TEST_CASE("Crank-Nicolson amplification of a sine mode") {
    // u_tau = u_qq on [0, 1] (shifted to [1, 2]) with zero Dirichlet faces.
    const std::size_t n = 41;
    const auto grid = discretize::make_grid(models::Chart::Price, 1.0, 2.0, n);
    const auto op = discretize::assemble_1d(constant(1.0, 0.0, 0.0), grid, {dirichlet(0.0), dirichlet(0.0), {}, {}});
    const double h = grid.spacing();
    const double dt = 0.01;
    const double pi = std::numbers::pi;
    for (int mode : {1, 5, 20, 39}) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(mode * pi * i * h);
        solve::EvolveOptions opt;
        opt.maturity = dt;
        opt.steps = 1;
        opt.smoothing_half_steps = 0;
        const auto s = solve::evolve_1d(op, u, opt);
        const double lambda = -4.0 / (h * h) * std::pow(std::sin(mode * pi * h / 2), 2);
        const double g = (1 + 0.5 * dt * lambda) / (1 - 0.5 * dt * lambda);
        CHECK(std::abs(g) <= 1.0);
        const std::size_t probe = n / 3;
        if (std::abs(u[probe]) > 1e-3) CHECK(s.final_values()[probe] / u[probe] == doctest::Approx(g).epsilon(1e-10));
    }
}

TEST_CASE("slices and checkpoints") {
    auto spec = bs(models::ModelKind::BS1);
    pricer::Instrument inst;
    auto num = numerics(201, 100, models::Chart::Log);
    num.checkpoints = {0.25, 0.5};
    const auto res = pricer::price(spec, inst, num);
    const auto& s = res.surface;
    REQUIRE(s.taus.size() == 4);
    CHECK(s.taus.front() == 0.0);
    CHECK(s.taus[1] == doctest::Approx(0.25));
    CHECK(s.taus.back() == 1.0);
    for (std::size_t i = 0; i < s.grid.size(); ++i) CHECK(s.values[0][i] == inst.payoff(s.grid.price_at(i)));
    solve::EvolveOptions bad;
    bad.checkpoints = {2.0};
    const auto op = pricer::assemble_1d(spec, inst, num);
    CHECK_THROWS_AS(solve::evolve_1d(op, s.values[0], bad), std::invalid_argument);
}

TEST_CASE("BS1 against the closed form") {
    const auto res = pricer::price(bs(models::ModelKind::BS1), {}, numerics(401, 400, models::Chart::Log));
    const double ref = oracles::bs_closed_form(100, 100, 0.02, 0.2, 1, PayoffKind::Call);
    CHECK(std::abs(res.price - ref) / ref < 5e-3);
    const double s101 = solve::interpolate(res.surface, 101.0);
    CHECK(std::abs(s101 - oracles::bs_closed_form(101, 100, 0.02, 0.2, 1, PayoffKind::Call)) < 5e-3 * ref);
}

TEST_CASE("interpolation") {
    solve::PriceSurface s;
    s.grid = discretize::make_grid(models::Chart::Price, 1.0, 3.0, 3);
    s.taus = {0.0};
    s.values = {{1.0, 5.0, 2.0}};
    CHECK(solve::interpolate(s, 2.0) == 5.0);
    CHECK(solve::interpolate(s, 1.5) == doctest::Approx(3.0));
    CHECK(solve::interpolate(s, 3.0) == 2.0);
    CHECK_THROWS_AS(solve::interpolate(s, 3.5), std::out_of_range);
    CHECK_THROWS_AS(solve::interpolate(s, 0.5), std::out_of_range);
}

TEST_CASE("degenerate second axis reproduces the 1D solve") {
    // b2 = b1 = 0 and a0 = 0: the w sweep is the identity.
    auto g = constant(0.02, 0.0, 0.0);
    g.dimension = 2;
    g.a2 = expr::parse("0.02*q^2", {"q"});
    g.a1 = expr::parse("0.02*q", {"q"});
    g.b2 = Expr::constant(0.0);
    g.b1 = Expr::constant(0.0);
    g.w_var = "w";
    g.x_var = "q";
    const auto g1 = [&] {
        auto c = g;
        c.dimension = 1;
        return c;
    }();
    const Payoff call{PayoffKind::Call, 100.0};
    const auto grid1 = discretize::make_grid(models::Chart::Price, 12.5, 800.0, 201);
    const auto grid2 = discretize::make_grid_2d(12.5, 800.0, 201, 0.01, 0.1, 6);
    const auto op1 = discretize::assemble_1d(g1, grid1, discretize::default_boundaries(call, g1, grid1));
    const auto op2 = discretize::assemble_2d(g, grid2, discretize::default_boundaries(call, g, grid2));
    solve::EvolveOptions opt;
    opt.steps = 100;
    const auto s1 = solve::evolve_1d(op1, discretize::sample_payoff(call, grid1), opt);
    const auto s2 = solve::evolve_2d(op2, discretize::sample_payoff(call, grid2), opt);
    double worst = 0.0;
    for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t i = 0; i < 201; ++i)
            worst = std::max(worst, std::abs(s2.final_values()[grid2.index(i, j)] - s1.final_values()[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("MG with frozen volatility matches Black-Scholes") {
    models::ModelSpec mg;
    mg.kind = models::ModelKind::MG;
    mg.xi = 1e-4;
    mg.r = 0.02;
    pricer::Numerics num;
    num.n = 200;
    num.n_w = 50;
    num.steps = 200;
    const auto res = pricer::price(mg, {}, num);
    const double ref = oracles::bs_closed_form(100, 100, 0.02, 0.2, 1, PayoffKind::Call);
    CHECK(std::abs(res.price - ref) / ref < 1e-2);
}

TEST_CASE("eta = 0 is bitwise MG") {
    models::ModelSpec a;
    a.kind = models::ModelKind::MG;
    a.xi = 0.5;
    a.r = 0.02;
    auto b = a;
    b.kind = models::ModelKind::NCMG_ETA;
    pricer::Numerics num;
    num.n = 60;
    num.n_w = 12;
    num.steps = 20;
    const auto pa = pricer::price(a, {}, num);
    const auto pb = pricer::price(b, {}, num);
    CHECK(checks::bitwise_equal(pa.surface.final_values(), pb.surface.final_values()));
}

TEST_CASE("parity, positivity and charts") {
    pricer::Instrument inst;
    const auto num = numerics(401, 400, models::Chart::Log);
    CHECK(checks::put_call_parity_gap(bs(models::ModelKind::BS1), inst, num) < 1e-2 * 100);
    CHECK(checks::put_call_parity_gap(bs(models::ModelKind::BS2, 0.05), inst, num) < 1e-2 * 100);

    auto put = inst;
    put.payoff.kind = PayoffKind::Put;
    for (const auto& i : {inst, put}) {
        const auto res = pricer::price(bs(models::ModelKind::BS2, 0.05), i, num);
        for (double v : res.surface.final_values()) CHECK(v >= -1e-8 * 100);
    }

    auto price_chart = bs(models::ModelKind::BS1);
    price_chart.chart = models::Chart::Price;
    auto log_chart = price_chart;
    log_chart.chart = models::Chart::Log;
    auto gap = [&](std::size_t n) {
        return std::abs(pricer::price(price_chart, inst, numerics(n + 1, 400, models::Chart::Price)).price -
                        pricer::price(log_chart, inst, numerics(n + 1, 400, models::Chart::Log)).price) /
               oracles::bs_closed_form(100, 100, 0.02, 0.2, 1, PayoffKind::Call);
    };
    const double g400 = gap(400), g800 = gap(800);
    CHECK(g400 < 1e-2);
    CHECK(g800 < g400);
}

TEST_CASE("determinism") {
    const auto a = pricer::price(bs(models::ModelKind::BS2, 0.05), {}, numerics(201, 100, models::Chart::Log));
    const auto b = pricer::price(bs(models::ModelKind::BS2, 0.05), {}, numerics(201, 100, models::Chart::Log));
    CHECK(checks::bitwise_equal(a.surface.final_values(), b.surface.final_values()));
}

TEST_CASE("convergence study bookkeeping") {
    // Synthetic price with error 1/n^2.
    auto f = [](std::size_t n, int) { return 1.0 + 1.0 / double(n * n); };
    const auto rows = solve::convergence_study(f, {{10, 1}, {20, 1}, {40, 1}}, 1.0);
    REQUIRE(rows.size() == 3);
    CHECK(std::isnan(rows[0].ratio));
    CHECK(rows[1].ratio == doctest::Approx(4.0));
    CHECK(rows[2].order == doctest::Approx(2.0));
    const auto rich = solve::convergence_study(f, {{10, 1}, {20, 1}, {40, 1}}, std::nullopt);
    CHECK(rich[0].reference == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(solve::convergence_study(f, {{10, 1}}, std::nullopt), std::invalid_argument);
}

TEST_CASE("blow-up is reported with the step") {
    // Implicit Euler with 1 - dt a0 = 1e-3 amplifies by 1e3 per step and overflows near step 103.
    const auto grid = discretize::make_grid(models::Chart::Price, 1.0, 2.0, 11);
    const auto op = discretize::assemble_1d(constant(0.0, 0.0, 9.99), grid, {dirichlet(0.0), dirichlet(0.0), {}, {}});
    solve::EvolveOptions opt;
    opt.maturity = 20.0;
    opt.steps = 200;
    opt.scheme = solve::Scheme::ImplicitEuler;
    try {
        solve::evolve_1d(op, std::vector<double>(11, 1.0), opt);
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("step 10") != std::string::npos);
    }
}
