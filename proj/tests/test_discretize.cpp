#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbs/checks.hpp"
#include "ncbs/discretize.hpp"
#include "ncbs/errors.hpp"

#include <cmath>

using namespace ncbs;
using namespace ncbs::discretize;
using expr::Expr;

namespace {

models::GeneratorCoefficients constant(double a2, double a1, double a0) {
    models::GeneratorCoefficients g;
    g.a2 = Expr::constant(a2);
    g.a1 = Expr::constant(a1);
    g.a0 = Expr::constant(a0);
    return g;
}

models::ModelSpec bs1() {
    models::ModelSpec s;
    s.kind = models::ModelKind::BS1;
    s.sigma = 0.2;
    return s;
}

}  // namespace

TEST_CASE("grids") {
    const auto g = make_grid(Chart::Price, 1.0, 3.0, 5);
    CHECK(g.size() == 5);
    CHECK(g.spacing() == doctest::Approx(0.5));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] - g.nodes[i - 1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(make_grid(Chart::Price, 1.0, 3.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(Chart::Price, 0.0, 3.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(Chart::Price, 3.0, 1.0, 5), std::invalid_argument);
    CHECK_NOTHROW(make_grid(Chart::Log, -1.0, 1.0, 5));
    CHECK(make_grid(Chart::Log, 0.0, 1.0, 3).price_at(2) == doctest::Approx(std::exp(1.0)));
    CHECK_THROWS_AS(make_grid_2d(1.0, 2.0, 5, 0.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("constant-coefficient Laplacian stencil") {
    const auto g = make_grid(Chart::Price, 1.0, 2.0, 11);
    const auto op = assemble_1d(constant(1.0, 0.0, 0.0), g, {});
    const double inv = 1.0 / (g.spacing() * g.spacing());
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        CHECK(op.matrix.sub[i] == doctest::Approx(inv));
        CHECK(op.matrix.diag[i] == doctest::Approx(-2.0 * inv));
        CHECK(op.matrix.sup[i] == doctest::Approx(inv));
    }
    CHECK(op.matrix.diag[0] == 0.0);
    CHECK(op.matrix.diag[10] == 0.0);
}

TEST_CASE("BS1 stencil at q = 100 with unit spacing") {
    // sub = a2 - a1/2, diag = -2 a2 + a0, sup = a2 + a1/2 with a2 = 200, a1 = 2, a0 = -0.02.
    const auto gen = models::build_generator(bs1());
    const auto op = assemble_1d(gen, make_grid(Chart::Price, 99.0, 101.0, 3), {});
    CHECK(op.matrix.sub[1] == doctest::Approx(199.0));
    CHECK(op.matrix.diag[1] == doctest::Approx(-400.02));
    CHECK(op.matrix.sup[1] == doctest::Approx(201.0));
}

TEST_CASE("MG per-axis stencils carry half of a0") {
    models::ModelSpec s;
    s.kind = models::ModelKind::MG;
    s.xi = 0.5;
    s.r = 0.02;
    const auto gen = models::build_generator(s);
    const auto grid = make_grid_2d(99.0, 101.0, 3, 0.03, 0.05, 5);
    const auto op = assemble_2d(gen, grid, {});
    // q line at w = 0.04 (j = 2), node q = 100: a2 = 200, a1 = 2, spacing 1.
    CHECK(op.q_lines[2].sub[1] == doctest::Approx(199.0));
    CHECK(op.q_lines[2].diag[1] == doctest::Approx(-400.01));
    // w line at q = 100 (i = 1), node w = 0.04: b2 = 4e-4, b1 = 0.005, spacing 0.005.
    const double hw = 0.005;
    CHECK(op.w_lines[1].sub[2] == doctest::Approx(4e-4 / (hw * hw) - 0.005 / (2 * hw)));
    CHECK(op.w_lines[1].diag[2] == doctest::Approx(-2 * 4e-4 / (hw * hw) - 0.01));
    CHECK(op.w_lines[1].sup[2] == doctest::Approx(4e-4 / (hw * hw) + 0.005 / (2 * hw)));
    CHECK_THROWS_AS(assemble_2d(gen, make_grid_2d(99.0, 101.0, 3, 0.03, 0.05, 3), {}), std::invalid_argument);
}

TEST_CASE("theta = 0 assembly is entry-wise identical") {
    auto nc = bs1();
    nc.kind = models::ModelKind::NCBS1;
    nc.f = expr::parse("q^2/100", {"q"});
    const auto grid = make_grid(Chart::Price, 12.5, 800.0, 201);
    const auto a = assemble_1d(models::build_generator(nc), grid, {});
    const auto b = assemble_1d(models::build_generator(bs1()), grid, {});
    CHECK(checks::bitwise_equal(a.matrix.sub, b.matrix.sub));
    CHECK(checks::bitwise_equal(a.matrix.diag, b.matrix.diag));
    CHECK(checks::bitwise_equal(a.matrix.sup, b.matrix.sup));
}

TEST_CASE("default boundaries") {
    const auto gen = models::build_generator(bs1());
    const auto grid = make_grid(Chart::Price, 12.5, 800.0, 11);
    const auto call = default_boundaries({PayoffKind::Call, 100.0}, gen, grid);
    CHECK(call.upper.value(0.0, 0.0) == doctest::Approx(700.0));
    CHECK(call.upper.value(1.0, 0.0) == doctest::Approx(800.0 - 100.0 * std::exp(-0.02)));
    for (double tau : {0.0, 0.5, 1.0}) CHECK(call.lower.value(tau, 0.0) == 0.0);
    const auto put = default_boundaries({PayoffKind::Put, 100.0}, gen, grid);
    CHECK(put.lower.value(1.0, 0.0) == doctest::Approx(100.0 * std::exp(-0.02) - 12.5));
    CHECK(put.upper.value(1.0, 0.0) == 0.0);
    CHECK(call.w_lower.kind == FaceKind::ZeroSecondDerivative);
}

TEST_CASE("operator properties") {
    pricer::Instrument inst;
    pricer::Numerics num;
    CHECK(checks::kinetic_asymmetry(bs1(), inst, num) < 1e-12);
    auto nc = bs1();
    nc.kind = models::ModelKind::NCBS1;
    nc.theta = 0.1;
    nc.f = expr::parse("q", {"q"});
    CHECK(checks::kinetic_asymmetry(nc, inst, num) < 1e-12);

    // Conservation of constants with a1 = a0 = 0.
    const auto grid = make_grid(Chart::Price, 1.0, 5.0, 33);
    auto g = constant(0.0, 0.0, 0.0);
    g.a2 = expr::parse("q^2 + ln(q)", {"q"});
    const auto op = assemble_1d(g, grid, {});
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) CHECK(op.matrix.sub[i] + op.matrix.diag[i] + op.matrix.sup[i] == 0.0);
}

TEST_CASE("second-order consistency") {
    const auto gen = models::build_generator(bs1());
    // C = sin(q/20): L C = a2 C'' + a1 C' + a0 C with a2 = 0.02 q^2, a1 = 0.02 q, a0 = -0.02.
    auto exact = [](double q) {
        return -0.02 * q * q * std::sin(q / 20) / 400 + 0.02 * q * std::cos(q / 20) / 20 - 0.02 * std::sin(q / 20);
    };
    auto err = [&](std::size_t n) {
        const auto grid = make_grid(Chart::Price, 50.0, 150.0, n);
        const auto op = assemble_1d(gen, grid, {});
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(grid.nodes[i] / 20);
        const auto lu = discretize::apply(op, u);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) worst = std::max(worst, std::abs(lu[i] - exact(grid.nodes[i])));
        return worst;
    };
    const double e1 = err(81), e2 = err(161), e3 = err(321);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("assembly failures name the node") {
    auto g = constant(1.0, 0.0, 0.0);
    g.a0 = expr::parse("1/(q-2)", {"q"});
    try {
        assemble_1d(g, make_grid(Chart::Price, 1.0, 3.0, 5), {});
        FAIL("expected a numerical error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("q=2") != std::string::npos);
    }
}

TEST_CASE("Peclet diagnostics") {
    const auto grid = make_grid(Chart::Price, 1.0, 2.0, 11);
    CHECK(max_cell_peclet(assemble_1d(constant(1.0, 0.0, 0.0), grid, {})) == 0.0);
    CHECK(max_cell_peclet(assemble_1d(constant(1.0, 40.0, 0.0), grid, {})) == doctest::Approx(2.0));
}
