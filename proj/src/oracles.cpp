#include "ncbs/oracles.hpp"

#include "ncbs/errors.hpp"
#include "ncbs/tridiagonal.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace ncbs::oracles {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_closed_form(double S, double K, double r, double sigma, double T, PayoffKind kind) {
    if (!(S > 0.0 && K > 0.0 && sigma > 0.0 && T > 0.0)) throw std::invalid_argument("bs_closed_form needs S, K, sigma, T > 0");
    const double vol = sigma * std::sqrt(T);
    const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * T) / vol;
    const double d2 = d1 - vol;
    const double df = std::exp(-r * T);
    if (kind == PayoffKind::Call) return S * normal_cdf(d1) - K * df * normal_cdf(d2);
    return K * df * normal_cdf(-d2) - S * normal_cdf(-d1);
}

namespace {

double far_field(const Payoff& p, double S, double tau, double r, bool upper) {
    if (p.kind == PayoffKind::Call) return upper ? S - p.strike * std::exp(-r * tau) : 0.0;
    return upper ? 0.0 : p.strike * std::exp(-r * tau) - S;
}

}  // namespace

double heat_transform_price(double S0, const Payoff& payoff, double r, double sigma, double T, std::size_t n, int steps) {
    return heat_transform_price(
        S0, [&](double s) { return payoff(s); },
        [&](double s, double tau) { return far_field(payoff, s, tau, r, false); },
        [&](double s, double tau) { return far_field(payoff, s, tau, r, true); }, r, sigma, T, n, steps);
}

double heat_transform_price(double S0, const std::function<double(double)>& payoff,
                            const std::function<double(double, double)>& lower,
                            const std::function<double(double, double)>& upper, double r, double sigma, double T,
                            std::size_t n, int steps) {
    if (!(S0 > 0.0 && sigma > 0.0 && T > 0.0)) throw std::invalid_argument("heat_transform_price needs S0, sigma, T > 0");
    if (n < 4 || steps < 1) throw std::invalid_argument("heat_transform_price needs n >= 4 and steps >= 1");
    const double s2 = sigma * sigma;
    const double a = 0.5 - r / s2;
    const double b = (0.5 * s2 + r) * (0.5 * s2 + r) / (2.0 * s2);
    const double x0 = std::log(S0);
    const double half = 6.0 * sigma * std::sqrt(T);
    const double lo = x0 - half;
    const double dx = 2.0 * half / static_cast<double>(n - 1);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + dx * static_cast<double>(i);

    // psi = exp(-a x + b tau) C
    auto to_psi = [&](double xi, double tau, double c) { return c == 0.0 ? 0.0 : std::exp(-a * xi + b * tau) * c; };
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = to_psi(x[i], 0.0, payoff(std::exp(x[i])));

    const double k = 0.5 * s2 / (dx * dx);
    const double dt = T / steps;
    const std::size_t m = n - 2;
    std::vector<double> rhs(m);
    auto step = [&](double h, double theta, double tau_new) {
        const double c_impl = theta * h * k;
        const double c_expl = (1.0 - theta) * h * k;
        const double g_lo = to_psi(x.front(), tau_new, lower(std::exp(x.front()), tau_new));
        const double g_hi = to_psi(x.back(), tau_new, upper(std::exp(x.back()), tau_new));
        Tridiagonal sys(m);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t i = j + 1;
            sys.sub[j] = -c_impl;
            sys.diag[j] = 1.0 + 2.0 * c_impl;
            sys.sup[j] = -c_impl;
            rhs[j] = psi[i] + c_expl * (psi[i - 1] - 2.0 * psi[i] + psi[i + 1]);
        }
        rhs.front() += c_impl * g_lo;
        rhs.back() += c_impl * g_hi;
        const auto y = tridiagonal_solve(sys, rhs);
        for (std::size_t j = 0; j < m; ++j) psi[j + 1] = y[j];
        psi.front() = g_lo;
        psi.back() = g_hi;
    };
    step(0.5 * dt, 1.0, 0.5 * dt);
    step(0.5 * dt, 1.0, dt);
    for (int s = 1; s < steps; ++s) step(dt, 0.5, (s + 1) * dt);

    const double pos = (x0 - lo) / dx;
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double t = pos - static_cast<double>(i);
    auto price_at = [&](std::size_t j) { return psi[j] == 0.0 ? 0.0 : std::exp(a * x[j] - b * T) * psi[j]; };
    const double v = t == 0.0 ? price_at(i) : (1.0 - t) * price_at(i) + t * price_at(i + 1);
    if (!std::isfinite(v)) throw NumericalError("heat transform produced a non-finite price");
    return v;
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ path);
}

namespace {

// Per-path normal stream: uniforms on (0,1) from the top 53 bits, polar method.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s >= 1.0 || s == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * f;
            has_spare_ = true;
            return u * f;
        }
    }

private:
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

class Welford {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    double mean() const { return mean_; }
    double stderr_() const { return n_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)); }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

Payoff make_payoff(PayoffKind kind, double K) { return Payoff{kind, K}; }

}  // namespace

McEstimate mc_gbm_expectation(double S0, double r, double sigma, double T, std::size_t paths, std::uint64_t seed,
                              const std::function<double(double)>& g, double discount) {
    if (paths < 1) throw std::invalid_argument("mc_gbm needs at least one path");
    if (!(S0 > 0.0 && sigma >= 0.0 && T > 0.0)) throw std::invalid_argument("mc_gbm needs S0, T > 0 and sigma >= 0");
    const double drift = (r - 0.5 * sigma * sigma) * T;
    const double vol = sigma * std::sqrt(T);
    Welford acc;
    for (std::size_t i = 0; i < paths; ++i) {
        NormalStream z(path_seed(seed, i));
        const double st = S0 * std::exp(drift + vol * z.next());
        acc.add(discount * g(st));
    }
    return {acc.mean(), acc.stderr_(), paths, 1, seed};
}

McEstimate mc_gbm_price(double S0, double K, double r, double sigma, double T, std::size_t paths, std::uint64_t seed,
                        PayoffKind kind) {
    const Payoff p = make_payoff(kind, K);
    return mc_gbm_expectation(S0, r, sigma, T, paths, seed, [&](double s) { return p(s); }, std::exp(-r * T));
}

McEstimate mc_mg_expectation(double S0, double w0, double r, double xi, double T, std::size_t paths, int steps,
                             std::uint64_t seed, const std::function<double(double)>& g, double w_floor) {
    if (paths < 1 || steps < 1) throw std::invalid_argument("mc_mg needs paths >= 1 and steps >= 1");
    if (!(S0 > 0.0 && w0 > 0.0 && T > 0.0 && xi >= 0.0)) throw std::invalid_argument("mc_mg needs S0, w0, T > 0 and xi >= 0");
    if (!(w_floor > 0.0 && w_floor <= w0)) throw std::invalid_argument("mc_mg needs 0 < w_floor <= w0");
    const double dt = T / steps;
    const double sdt = std::sqrt(dt);
    const double w_drift = 0.5 * xi * xi * dt;
    const double w_vol = std::numbers::sqrt2 * xi * sdt;
    const double discount = std::exp(-r * T);
    Welford acc;
    for (std::size_t i = 0; i < paths; ++i) {
        NormalStream z(path_seed(seed, i));
        double lq = std::log(S0);
        double w = w0;
        for (int k = 0; k < steps; ++k) {
            const double z1 = z.next();
            const double z2 = z.next();
            lq += std::sqrt(w) * sdt * z1;
            w += w_drift * w + w_vol * w * z2;
            if (w < w_floor) w = std::max(2.0 * w_floor - w, w_floor);
        }
        acc.add(discount * g(std::exp(lq)));
    }
    return {acc.mean(), acc.stderr_(), paths, steps, seed};
}

McEstimate mc_mg_price(double S0, double w0, double K, double r, double xi, double T, std::size_t paths, int steps,
                       std::uint64_t seed, PayoffKind kind, double w_floor) {
    const Payoff p = make_payoff(kind, K);
    return mc_mg_expectation(S0, w0, r, xi, T, paths, steps, seed, [&](double s) { return p(s); }, w_floor);
}

}  // namespace ncbs::oracles
