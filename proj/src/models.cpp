#include "ncbs/models.hpp"

#include "ncbs/errors.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace ncbs::models {

using expr::Bindings;
using expr::Expr;

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 7> kNames{{
    {ModelKind::BS1, "BS1"},
    {ModelKind::BS2, "BS2"},
    {ModelKind::NCBS1, "NCBS1"},
    {ModelKind::NCBS2, "NCBS2"},
    {ModelKind::MG, "MG"},
    {ModelKind::NCMG_THETA, "NCMG_THETA"},
    {ModelKind::NCMG_ETA, "NCMG_ETA"},
}};

bool uses_alpha(ModelKind k) { return k == ModelKind::BS2 || k == ModelKind::NCBS2; }

bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ModelError(std::string(name) + " must be finite");
}

void require_elliptic(const Expr& coeff, const char* name, const GeneratorCoefficients& gen,
                      const geometry::Interval& xdom, const geometry::Interval& wdom) {
    const auto xs = geometry::sample_points(xdom);
    const auto ws = gen.dimension == 2 ? geometry::sample_points(wdom, 50) : std::vector<double>{0.0};
    for (double w : ws) {
        for (double x : xs) {
            Bindings b{{gen.x_var, x}};
            if (gen.dimension == 2) b.set(gen.w_var, w);
            double v = 0.0;
            try {
                v = expr::evaluate(coeff, b);
            } catch (const DomainError& e) {
                std::ostringstream os;
                os << "coefficient " << name << " cannot be evaluated at " << gen.x_var << "=" << x;
                if (gen.dimension == 2) os << ", " << gen.w_var << "=" << w;
                os << ": " << e.what();
                throw ModelError(os.str());
            }
            if (!(v > 0.0)) {
                std::ostringstream os;
                os << "ellipticity violated: " << name << " = " << v << " at " << gen.x_var << "=" << x;
                if (gen.dimension == 2) os << ", " << gen.w_var << "=" << w;
                throw ModelError(os.str());
            }
        }
    }
}

// Potential U as an expression; for the BS2 family the constant alpha^2/2
// of the Hamiltonian is folded in (U_eff).
Expr effective_potential(const ModelSpec& spec, double alpha) {
    if (std::holds_alternative<MatchBS>(spec.potential)) {
        const auto r = matched_rate(spec);
        return Expr::constant(*r);
    }
    const Expr& U = std::get<Expr>(spec.potential);
    if (uses_alpha(spec.kind)) return U + Expr::constant(0.5 * alpha * alpha);
    return U;
}

GeneratorCoefficients build_bs_family(const ModelSpec& spec) {
    if (!(spec.sigma > 0.0)) throw ModelError("sigma must be positive");
    require_finite(spec.theta, "theta");
    const bool nc = is_noncommutative(spec.kind);
    if (!nc && spec.theta != 0.0) throw ModelError(std::string(to_string(spec.kind)) + " takes no theta deformation");
    if (nc && spec.chart == Chart::Log)
        throw ModelError("noncommutative models require the price chart: f(q) is chart specific");

    const double alpha = effective_alpha(spec);
    const double mass_scale = 0.5 * spec.sigma * spec.sigma;  // hbar^2/(2m) with m = 1/sigma^2

    GeneratorCoefficients gen;
    gen.dimension = 1;
    gen.chart = spec.chart;
    gen.kinetic_scale = mass_scale;
    geometry::Interval xdom = spec.q_domain;
    const Expr U = effective_potential(spec, alpha);

    if (spec.chart == Chart::Log) {
        // x = ln q: the metric is flat and alpha q d/dq becomes alpha d/dx.
        gen.x_var = "x";
        xdom = {std::log(spec.q_domain.lo), std::log(spec.q_domain.hi)};
        const geometry::MetricFactor1D flat{Expr::constant(1.0), "x", xdom};
        const auto lb = geometry::lb_coefficients_1d(flat);
        gen.metric_factor = flat.h;
        gen.a2 = mass_scale * lb.a2;
        gen.kinetic_a1 = mass_scale * lb.a1;
        gen.a1 = gen.kinetic_a1 + Expr::constant(alpha);
        gen.a0 = -expr::substitute(U, "q", expr::exp(Expr::variable("x")));
    } else {
        const Expr q = Expr::variable("q");
        const geometry::MetricFactor1D base{q, "q", spec.q_domain};
        geometry::validate(base);
        const geometry::DeformationSpec d{spec.theta, spec.f, Expr{}, 0.0};
        const auto metric = geometry::deformed_factor_1d(base, d);
        const auto lb = geometry::lb_coefficients_1d(metric);
        gen.metric_factor = metric.h;
        gen.a2 = mass_scale * lb.a2;
        gen.kinetic_a1 = mass_scale * lb.a1;
        // -alpha q (p + theta f p) with p -> -i d/dq, Wick rotated.
        gen.a1 = gen.kinetic_a1 + Expr::constant(alpha) * q * (1.0 + Expr::constant(spec.theta) * spec.f);
        gen.a0 = -U;
    }
    require_elliptic(gen.a2, "a2", gen, xdom, {});
    return gen;
}

GeneratorCoefficients build_mg_family(const ModelSpec& spec) {
    if (spec.rho != 0.0) throw ModelError("correlated drivers (rho != 0) are not supported; the model has rho = 0");
    if (!(spec.xi > 0.0)) throw ModelError("xi must be positive");
    require_finite(spec.theta, "theta");
    require_finite(spec.eta, "eta");
    if (spec.chart == Chart::Log) throw ModelError("two-factor models use the price chart");
    if (spec.kind != ModelKind::NCMG_THETA && spec.theta != 0.0)
        throw ModelError(std::string(to_string(spec.kind)) + " takes no theta deformation");
    if (spec.kind != ModelKind::NCMG_ETA && spec.eta != 0.0)
        throw ModelError(std::string(to_string(spec.kind)) + " takes no eta deformation");

    const Expr q = Expr::variable("q");
    const Expr w = Expr::variable("w");
    const geometry::DeformationSpec d{spec.theta, spec.f, spec.g, spec.eta};

    const geometry::MetricFactor1D q_base{q, "q", spec.q_domain};
    geometry::validate(q_base);
    const Expr hq = geometry::deformed_factor_1d(q_base, d).h;
    const geometry::MetricFactor1D w_base{w, "w", spec.w_domain};
    geometry::validate(w_base);
    const Expr hw = geometry::deformed_w_factor(w, "w", spec.w_domain, d);

    const geometry::DiagonalMetric2D metric{w * expr::pow(hq, 2),
                                            Expr::constant(2.0 * spec.xi * spec.xi) * expr::pow(hw, 2),
                                            "q",
                                            "w",
                                            spec.q_domain,
                                            spec.w_domain};
    const auto lb = geometry::lb_coefficients_2d(metric);

    GeneratorCoefficients gen;
    gen.dimension = 2;
    gen.chart = Chart::Price;
    gen.kinetic_scale = 0.5;
    gen.a2 = 0.5 * lb.A;
    gen.b2 = 0.5 * lb.B;
    gen.a1 = 0.5 * lb.C;
    gen.b1 = 0.5 * lb.D;
    gen.kinetic_a1 = gen.a1;

    Expr U;
    if (std::holds_alternative<MatchBS>(spec.potential)) {
        if (!spec.r) throw ModelError("matched potential requires the rate r");
        if (*spec.r < 0.0) throw ModelError("matched rate r must be non-negative");
        U = Expr::constant(*spec.r);
    } else {
        U = std::get<Expr>(spec.potential);
    }
    gen.a0 = -U;

    if (spec.kind == ModelKind::NCMG_ETA) {
        const auto eta = geometry::eta_potential_terms(spec.xi, spec.eta);
        gen.a1 = gen.a1 + eta.linear_in_p;
        gen.a0 = gen.a0 - eta.scalar;
    }
    require_elliptic(gen.a2, "a2", gen, spec.q_domain, spec.w_domain);
    require_elliptic(gen.b2, "b2", gen, spec.q_domain, spec.w_domain);
    return gen;
}

}  // namespace

std::optional<double> matched_rate(const ModelSpec& spec) {
    if (!std::holds_alternative<MatchBS>(spec.potential)) return std::nullopt;
    switch (spec.kind) {
    case ModelKind::BS1:
    case ModelKind::NCBS1: {
        const double forced = 0.5 * spec.sigma * spec.sigma;
        if (spec.r && !same_rate(*spec.r, forced)) {
            std::ostringstream os;
            os << to_string(spec.kind) << " reproduces Black-Scholes only for r = sigma^2/2 = " << forced << " (got r = "
               << *spec.r << ")";
            throw ModelError(os.str());
        }
        return forced;
    }
    default:
        if (!spec.r) throw ModelError("matched potential requires the rate r");
        if (*spec.r < 0.0) throw ModelError("matched rate r must be non-negative");
        return spec.r;
    }
}

double effective_alpha(const ModelSpec& spec) {
    if (!uses_alpha(spec.kind)) {
        if (spec.alpha && *spec.alpha != 0.0)
            throw ModelError(std::string(to_string(spec.kind)) + " has no alpha parameter");
        return 0.0;
    }
    if (std::holds_alternative<MatchBS>(spec.potential)) {
        const double matched = *matched_rate(spec) - 0.5 * spec.sigma * spec.sigma;
        if (spec.alpha && !same_rate(*spec.alpha, matched)) {
            std::ostringstream os;
            os << "matching requires alpha = r - sigma^2/2 = " << matched << " (got alpha = " << *spec.alpha << ")";
            throw ModelError(os.str());
        }
        return matched;
    }
    const double alpha = spec.alpha.value_or(0.0);
    require_finite(alpha, "alpha");
    return alpha;
}

GeneratorCoefficients build_generator(const ModelSpec& spec) {
    return is_two_factor(spec.kind) ? build_mg_family(spec) : build_bs_family(spec);
}

std::string_view wick_sign_convention() {
    return "t -> -i t; tau = T - t; dC/dtau = L C integrated forward from C(tau=0) = payoff to C(tau=T) = price";
}

std::string_view to_string(ModelKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    return std::nullopt;
}

std::string_view to_string(Chart chart) { return chart == Chart::Log ? "log" : "price"; }

bool is_two_factor(ModelKind kind) {
    return kind == ModelKind::MG || kind == ModelKind::NCMG_THETA || kind == ModelKind::NCMG_ETA;
}

bool is_bs_family(ModelKind kind) { return !is_two_factor(kind); }

bool is_noncommutative(ModelKind kind) {
    return kind == ModelKind::NCBS1 || kind == ModelKind::NCBS2 || kind == ModelKind::NCMG_THETA ||
           kind == ModelKind::NCMG_ETA;
}

}  // namespace ncbs::models
