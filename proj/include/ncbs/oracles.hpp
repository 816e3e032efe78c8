#pragma once

// Reference prices independent of the generator/assembly/solve path.

#include "ncbs/payoff.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>

namespace ncbs::oracles {

struct McEstimate {
    double price = 0.0;
    double stderr_ = 0.0;
    std::size_t paths = 0;
    int steps = 0;
    std::uint64_t seed = 0;
};

/// Phi(x) = erfc(-x / sqrt 2) / 2. std::erfc is accurate to a few ulp, far
/// inside the 7.5e-8 absolute budget of the classical rational approximations.
double normal_cdf(double x);

/// Black-Scholes price. Throws std::invalid_argument unless S, K, sigma, T > 0.
double bs_closed_form(double S, double K, double r, double sigma, double T, PayoffKind kind);

/// Black-Scholes through C = exp(a x - b tau) psi with x = ln S,
/// a = 1/2 - r/sigma^2, b = (sigma^2/2 + r)^2 / (2 sigma^2), which turns the
/// pricing equation into psi_tau = (sigma^2/2) psi_xx. psi is evolved by
/// Crank-Nicolson (two implicit Euler half-steps first) on n nodes over
/// ln S0 +- 6 sigma sqrt(T), with the call/put far-field values transformed
/// the same way.
double heat_transform_price(double S0, const Payoff& payoff, double r, double sigma, double T, std::size_t n, int steps);

/// Same, with an arbitrary payoff g(S) and Dirichlet far-field values
/// lower(S, tau), upper(S, tau) in price units.
double heat_transform_price(double S0, const std::function<double(double)>& payoff,
                            const std::function<double(double, double)>& lower,
                            const std::function<double(double, double)>& upper, double r, double sigma, double T,
                            std::size_t n, int steps);

/// discount * E[g(S_T)] under dS = r S dt + sigma S dW with exact lognormal
/// terminal sampling. Path i draws from its own mt19937_64 seeded by
/// path_seed(seed, i); normals use the Marsaglia polar method.
McEstimate mc_gbm_expectation(double S0, double r, double sigma, double T, std::size_t paths, std::uint64_t seed,
                              const std::function<double(double)>& g, double discount);

McEstimate mc_gbm_price(double S0, double K, double r, double sigma, double T, std::size_t paths, std::uint64_t seed,
                        PayoffKind kind);

/// Two-factor simulator for the generator
///   (1/2) q^2 w d2/dq2 + xi^2 w^2 d2/dw2 + (1/2) q w d/dq + (1/2) xi^2 w d/dw - r
/// i.e. dq = (1/2) q w dt + q sqrt(w) dW1, dw = (1/2) xi^2 w dt + sqrt(2) xi w dW2,
/// W1 and W2 independent. ln q is stepped exactly given w (its drift
/// vanishes); w is stepped by Euler-Maruyama and reflected at w_floor.
McEstimate mc_mg_expectation(double S0, double w0, double r, double xi, double T, std::size_t paths, int steps,
                             std::uint64_t seed, const std::function<double(double)>& g, double w_floor);

McEstimate mc_mg_price(double S0, double w0, double K, double r, double xi, double T, std::size_t paths, int steps,
                       std::uint64_t seed, PayoffKind kind, double w_floor);

/// splitmix64 mix of (seed, path index).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

}  // namespace ncbs::oracles
