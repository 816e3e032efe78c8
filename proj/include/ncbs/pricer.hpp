#pragma once

// End-to-end pricing: model -> generator -> grid -> operator -> evolution.

#include "ncbs/discretize.hpp"
#include "ncbs/models.hpp"
#include "ncbs/payoff.hpp"
#include "ncbs/solve.hpp"

#include <cstddef>
#include <optional>

namespace ncbs::pricer {

struct Instrument {
    Payoff payoff;
    double S0 = 100.0;
    double w0 = 0.04;  ///< initial variance, two-factor models only
    double T = 1.0;
};

/// Truncated domain in price coordinates; unset axes use the defaults below.
struct Domain {
    std::optional<geometry::Interval> q;
    std::optional<geometry::Interval> w;
};

struct Numerics {
    std::size_t n = 401;    ///< nodes along q (or x)
    std::size_t n_w = 51;   ///< nodes along w
    int steps = 400;
    solve::Scheme scheme = solve::Scheme::CrankNicolson;
    Domain domain;
    std::vector<double> checkpoints;
};

/// Price chart: [K/8, 8K]. Log chart: S0 exp(+-6 sigma sqrt(T)).
geometry::Interval default_q_domain(models::Chart chart, const Instrument& inst, double sigma);
/// [w0/10, 10 w0], so w_min = 0.01 w_max.
geometry::Interval default_w_domain(const Instrument& inst);

struct PriceResult {
    models::GeneratorCoefficients generator;
    solve::PriceSurface surface;
    double price = 0.0;
    double max_peclet = 0.0;
    geometry::Interval q_domain;
    geometry::Interval w_domain;
};

/// Builds the model on the truncated domain (the ModelSpec domains are
/// overwritten) and evolves the payoff to tau = T. The price is read at S0
/// (and w0) by linear interpolation.
PriceResult price(models::ModelSpec spec, const Instrument& inst, const Numerics& num);

/// Assembly only, for operator-level checks.
discretize::BandedOperator1D assemble_1d(const models::ModelSpec& spec, const Instrument& inst, const Numerics& num);
discretize::BandedOperator2D assemble_2d(const models::ModelSpec& spec, const Instrument& inst, const Numerics& num);

/// The model as priced: domains replaced by the truncated domain.
models::ModelSpec on_domain(models::ModelSpec spec, const Instrument& inst, const Numerics& num);

}  // namespace ncbs::pricer
