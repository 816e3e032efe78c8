#pragma once

// The pricing model catalog.
//
// Every model produces its Wick-rotated generator in time-to-maturity
// tau = T - t:
//
//     dC/dtau = a2 C_qq + b2 C_ww + a1 C_q + b1 C_w + a0 C,
//
// integrated forward from the payoff at tau = 0. Kinetic terms come from the
// Laplace-Beltrami operator of the model's metric with hbar = 1; BS-family
// models carry the mass m = 1/sigma^2, MG-family models the bare 1/2.

#include "ncbs/expr.hpp"
#include "ncbs/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace ncbs::models {

enum class ModelKind { BS1, BS2, NCBS1, NCBS2, MG, NCMG_THETA, NCMG_ETA };
enum class Chart { Price, Log };

/// Fix U (and alpha for the BS2 family) so the generator is the
/// Black-Scholes operator with constant discounting.
struct MatchBS {};
using Potential = std::variant<MatchBS, expr::Expr>;

struct ModelSpec {
    ModelKind kind = ModelKind::BS1;
    double sigma = 0.2;
    /// Optional for BS1/NCBS1 with MatchBS (forced to sigma^2/2).
    std::optional<double> r;
    /// BS2 family only. Derived from r when matching.
    std::optional<double> alpha;
    double theta = 0.0;
    expr::Expr f;  ///< deformation function of q
    expr::Expr g;  ///< deformation function of w
    double xi = 0.0;
    double eta = 0.0;
    /// Correlation of the two drivers; only the uncorrelated subset is supported.
    double rho = 0.0;
    Potential potential = MatchBS{};
    Chart chart = Chart::Price;
    /// Price-coordinate domain (q > 0) even in the log chart.
    geometry::Interval q_domain{1.0, 1000.0};
    geometry::Interval w_domain{0.004, 0.4};
};

struct GeneratorCoefficients {
    int dimension = 1;
    Chart chart = Chart::Price;
    std::string x_var = "q";  ///< "q" in the price chart, "x" = ln q in the log chart
    std::string w_var = "w";
    expr::Expr a2, a1, a0;
    expr::Expr b2, b1;
    /// 1D only: metric factor h with a2 = c h^2, and the kinetic first-order
    /// part c h h' (without drift terms beyond the Laplace-Beltrami operator).
    expr::Expr metric_factor;
    expr::Expr kinetic_a1;
    double kinetic_scale = 1.0;
};

/// Throws ModelError for violated constraints (BS1 matching with
/// r != sigma^2/2, non-positive a2/b2, rho != 0, ...).
GeneratorCoefficients build_generator(const ModelSpec& spec);

/// Constant rate r when the potential is matched (BS1 family: sigma^2/2).
std::optional<double> matched_rate(const ModelSpec& spec);

/// Drift parameter alpha actually used by the BS2 family.
double effective_alpha(const ModelSpec& spec);

/// Convention shared by every solver and report.
std::string_view wick_sign_convention();

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);
std::string_view to_string(Chart chart);

bool is_two_factor(ModelKind kind);
bool is_bs_family(ModelKind kind);
bool is_noncommutative(ModelKind kind);

}  // namespace ncbs::models
