#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbs/oracles.hpp"
#include "ncbs/pricer.hpp"

#include <cmath>
#include <numbers>

using namespace ncbs;
using namespace ncbs::oracles;

namespace {

// Discounted lognormal expectation by Simpson's rule in the normal variate.
double quadrature_call(double S, double K, double r, double sigma, double T) {
    const int m = 20000;
    const double lo = -10.0, hi = 10.0, h = (hi - lo) / m;
    double sum = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double z = lo + k * h;
        const double st = S * std::exp((r - 0.5 * sigma * sigma) * T + sigma * std::sqrt(T) * z);
        const double f = std::max(st - K, 0.0) * std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
        sum += f * (k == 0 || k == m ? 1 : (k % 2 ? 4 : 2));
    }
    return std::exp(-r * T) * sum * h / 3;
}

}  // namespace

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-13));
    CHECK(normal_cdf(-40.0) >= 0.0);
    for (double x : {0.3, 1.1, 2.7}) CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("closed form") {
    const double c = bs_closed_form(100, 100, 0.05, 0.2, 1, PayoffKind::Call);
    CHECK(c == doctest::Approx(10.450583572185565).epsilon(1e-12));
    CHECK(std::abs(c - quadrature_call(100, 100, 0.05, 0.2, 1)) < 1e-6);
    CHECK(std::abs(bs_closed_form(90, 100, 0.02, 0.3, 2, PayoffKind::Call) - quadrature_call(90, 100, 0.02, 0.3, 2)) < 1e-6);

    for (double S : {80.0, 100.0, 120.0}) {
        const double p = bs_closed_form(S, 100, 0.05, 0.2, 1, PayoffKind::Put);
        const double cc = bs_closed_form(S, 100, 0.05, 0.2, 1, PayoffKind::Call);
        CHECK(cc - p == doctest::Approx(S - 100 * std::exp(-0.05)).epsilon(1e-12));
        CHECK(bs_closed_form(S, 100, 0.05, 0.2, 1e-12, PayoffKind::Call) == doctest::Approx(std::max(S - 100, 0.0)));
    }
    double prev = 0.0;
    for (double S : {60.0, 80.0, 100.0, 120.0, 140.0}) {
        const double v = bs_closed_form(S, 100, 0.05, 0.2, 1, PayoffKind::Call);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(bs_closed_form(100, 100, 0.05, 0.3, 1, PayoffKind::Call) > c);
    CHECK_THROWS_AS(bs_closed_form(100, 100, 0.05, 0.0, 1, PayoffKind::Call), std::invalid_argument);
    CHECK_THROWS_AS(bs_closed_form(-1, 100, 0.05, 0.2, 1, PayoffKind::Call), std::invalid_argument);
}

TEST_CASE("heat-equation transform") {
    const Payoff call{PayoffKind::Call, 100.0};
    const Payoff put{PayoffKind::Put, 100.0};
    for (double r : {0.02, 0.05}) {
        for (const auto& p : {call, put}) {
            const double ref = bs_closed_form(100, 100, r, 0.2, 1, p.kind);
            CHECK(std::abs(heat_transform_price(100, p, r, 0.2, 1, 401, 400) - ref) < 5e-3 * 10.45);
        }
    }
    auto zero = [](double) { return 0.0; };
    auto zero2 = [](double, double) { return 0.0; };
    CHECK(heat_transform_price(100, zero, zero2, zero2, 0.05, 0.2, 1, 101, 50) == 0.0);

    // Independent of the BS2 generator route.
    models::ModelSpec bs2;
    bs2.kind = models::ModelKind::BS2;
    bs2.r = 0.05;
    pricer::Numerics num;
    const double pde = pricer::price(bs2, {}, num).price;
    CHECK(std::abs(heat_transform_price(100, call, 0.05, 0.2, 1, 401, 400) - pde) < 1e-2);
}

TEST_CASE("GBM Monte Carlo") {
    const auto id = [](double s) { return s; };
    const auto m = mc_gbm_expectation(100, 0.05, 0.2, 1, 100000, 1, id, std::exp(-0.05));
    CHECK(std::abs(m.price - 100.0) < 3 * m.stderr_);

    const auto flat = mc_gbm_price(100, 100, 0.05, 1e-12, 1, 1000, 3, PayoffKind::Call);
    CHECK(flat.price == doctest::Approx(100 - 100 * std::exp(-0.05)).epsilon(1e-9));

    const double ref = bs_closed_form(100, 100, 0.05, 0.2, 1, PayoffKind::Call);
    const auto a = mc_gbm_price(100, 100, 0.05, 0.2, 1, 200000, 42, PayoffKind::Call);
    CHECK(std::abs(a.price - ref) < 3 * a.stderr_);
    const auto b = mc_gbm_price(100, 100, 0.05, 0.2, 1, 200000, 42, PayoffKind::Call);
    CHECK(a.price == b.price);
    CHECK(a.stderr_ == b.stderr_);
    const auto c = mc_gbm_price(100, 100, 0.05, 0.2, 1, 200000, 43, PayoffKind::Call);
    CHECK(a.price != c.price);

    const auto quarter = mc_gbm_price(100, 100, 0.05, 0.2, 1, 50000, 42, PayoffKind::Call);
    CHECK(quarter.stderr_ / a.stderr_ == doctest::Approx(2.0).epsilon(0.2));
    CHECK(path_seed(1, 0) != path_seed(1, 1));
    CHECK(path_seed(1, 5) == path_seed(1, 5));
}

TEST_CASE("two-factor Monte Carlo") {
    const auto z = mc_mg_expectation(100, 0.04, 0.02, 0.5, 1, 1000, 20, 5, [](double) { return 0.0; }, 1e-6);
    CHECK(z.price == 0.0);
    CHECK(z.stderr_ == 0.0);

    // Frozen variance: GBM with rate r_eff = w0/2 under the simulated drift.
    const auto frozen = mc_mg_price(100, 0.04, 100, 0.02, 1e-8, 1, 100000, 50, 11, PayoffKind::Call, 1e-6);
    const double ref = bs_closed_form(100, 100, 0.02, 0.2, 1, PayoffKind::Call);
    CHECK(std::abs(frozen.price - ref) < 3 * frozen.stderr_ + 1e-3);

    const auto again = mc_mg_price(100, 0.04, 100, 0.02, 1e-8, 1, 100000, 50, 11, PayoffKind::Call, 1e-6);
    CHECK(again.price == frozen.price);
}
