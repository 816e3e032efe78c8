#pragma once

// Laplace-Beltrami coefficients for diagonal metrics.
//
// 1D metrics enter in factored form g^11 = h(q)^2, for which the covariant
// Laplacian is the self-adjoint h d/dq (h d/dq) = h^2 d2/dq2 + h h' d/dq.
// 2D diagonal metrics use the divergence form with sqrt|det g| = (g^11 g^22)^(-1/2).

#include "ncbs/expr.hpp"

#include <string>
#include <vector>

namespace ncbs::geometry {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Number of points used to certify positivity on a domain axis.
inline constexpr int kPositivitySamples = 1000;

struct MetricFactor1D {
    expr::Expr h;
    std::string var = "q";
    Interval domain;
};

struct DiagonalMetric2D {
    expr::Expr g11;
    expr::Expr g22;
    std::string q_var = "q";
    std::string w_var = "w";
    Interval q_domain;
    Interval w_domain;
};

/// theta deforms [q,p] by f(q) and [w,k] by g(w); eta deforms [p,k].
struct DeformationSpec {
    double theta = 0.0;
    expr::Expr f;
    expr::Expr g;
    double eta = 0.0;
};

struct Coefficients1D {
    expr::Expr a2;  ///< second-derivative coefficient h^2
    expr::Expr a1;  ///< first-derivative coefficient h h'
};

/// Delta = A d2/dq2 + B d2/dw2 + C d/dq + D d/dw.
struct Coefficients2D {
    expr::Expr A;
    expr::Expr B;
    expr::Expr C;
    expr::Expr D;
};

/// Throws ModelError if h <= 0 (or h fails to evaluate) at a sample point.
void validate(const MetricFactor1D& m);
void validate(const DiagonalMetric2D& m);

Coefficients1D lb_coefficients_1d(const MetricFactor1D& m);
Coefficients2D lb_coefficients_2d(const DiagonalMetric2D& m);

/// h_theta(q) = h(q) (1 + theta f(q)). Throws ModelError when 1 + theta f
/// is not strictly positive on the sampled domain.
MetricFactor1D deformed_factor_1d(const MetricFactor1D& base, const DeformationSpec& d);

/// Factor w (1 + theta g(w)) of the deformed variance axis; same positivity check.
expr::Expr deformed_w_factor(const expr::Expr& base, const std::string& w_var, const Interval& domain,
                             const DeformationSpec& d);

struct EtaTerms {
    expr::Expr linear_in_p;  ///< eta q^2 w^2
    expr::Expr scalar;       ///< eta^2 q^2 w^3 / 2
};

/// Extra Hamiltonian terms from the shift p -> p + eta w in (1/2) q^2 w p^2.
/// `xi` does not enter; it is accepted for symmetry with the MG metric.
EtaTerms eta_potential_terms(double xi, double eta);

/// Uniform sample points spanning [lo, hi] inclusive.
std::vector<double> sample_points(const Interval& domain, int count = kPositivitySamples);

}  // namespace ncbs::geometry
