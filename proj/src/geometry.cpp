#include "ncbs/geometry.hpp"

#include "ncbs/errors.hpp"

#include <sstream>

namespace ncbs::geometry {

using expr::Bindings;
using expr::Expr;

std::vector<double> sample_points(const Interval& domain, int count) {
    std::vector<double> pts(static_cast<std::size_t>(count));
    if (count == 1) {
        pts[0] = 0.5 * (domain.lo + domain.hi);
        return pts;
    }
    for (int i = 0; i < count; ++i)
        pts[static_cast<std::size_t>(i)] = domain.lo + (domain.hi - domain.lo) * i / (count - 1);
    return pts;
}

namespace {

void require_positive_domain(const Interval& d, const std::string& var) {
    if (!(d.lo > 0.0) || !(d.hi > d.lo)) {
        std::ostringstream os;
        os << "domain of " << var << " must satisfy 0 < lo < hi, got [" << d.lo << ", " << d.hi << "]";
        throw ModelError(os.str());
    }
}

void require_positive_on(const Expr& e, const std::string& var, const Interval& domain, const std::string& what) {
    for (double x : sample_points(domain)) {
        double v = 0.0;
        try {
            v = expr::evaluate(e, Bindings{{var, x}});
        } catch (const DomainError& err) {
            std::ostringstream os;
            os << what << " cannot be evaluated at " << var << "=" << x << ": " << err.what();
            throw ModelError(os.str());
        }
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << what << " is not positive at " << var << "=" << x << " (value " << v << ")";
            throw ModelError(os.str());
        }
    }
}

}  // namespace

void validate(const MetricFactor1D& m) {
    require_positive_domain(m.domain, m.var);
    require_positive_on(m.h, m.var, m.domain, "metric factor h");
}

void validate(const DiagonalMetric2D& m) {
    require_positive_domain(m.q_domain, m.q_var);
    require_positive_domain(m.w_domain, m.w_var);
    const auto qs = sample_points(m.q_domain);
    const auto ws = sample_points(m.w_domain);
    // Full-density sample lines through every 50th sample of the other axis.
    const std::size_t stride = 50;
    for (const auto* comp : {&m.g11, &m.g22}) {
        const char* label = comp == &m.g11 ? "metric component g11" : "metric component g22";
        for (std::size_t i = 0; i < qs.size(); ++i) {
            for (std::size_t j = 0; j < ws.size(); ++j) {
                if (i % stride != 0 && j % stride != 0 && i + 1 != qs.size() && j + 1 != ws.size()) continue;
                double v = 0.0;
                try {
                    v = expr::evaluate(*comp, Bindings{{m.q_var, qs[i]}, {m.w_var, ws[j]}});
                } catch (const DomainError& err) {
                    std::ostringstream os;
                    os << label << " cannot be evaluated at (" << qs[i] << ", " << ws[j] << "): " << err.what();
                    throw ModelError(os.str());
                }
                if (!(v > 0.0)) {
                    std::ostringstream os;
                    os << label << " is not positive at (" << qs[i] << ", " << ws[j] << ")";
                    throw ModelError(os.str());
                }
            }
        }
    }
}

Coefficients1D lb_coefficients_1d(const MetricFactor1D& m) {
    const Expr dh = expr::differentiate(m.h, m.var);
    return {m.h * m.h, m.h * dh};
}

Coefficients2D lb_coefficients_2d(const DiagonalMetric2D& m) {
    // sqrt(g11 g22) is the reciprocal of the volume density sqrt|det g_ab|.
    const Expr inv_density = expr::sqrt(m.g11 * m.g22);
    const Expr C = inv_density * expr::differentiate(m.g11 / inv_density, m.q_var);
    const Expr D = inv_density * expr::differentiate(m.g22 / inv_density, m.w_var);
    return {m.g11, m.g22, C, D};
}

MetricFactor1D deformed_factor_1d(const MetricFactor1D& base, const DeformationSpec& d) {
    const Expr factor = 1.0 + Expr::constant(d.theta) * d.f;
    require_positive_on(factor, base.var, base.domain, "deformation 1 + theta*f(" + base.var + ")");
    return {base.h * factor, base.var, base.domain};
}

Expr deformed_w_factor(const Expr& base, const std::string& w_var, const Interval& domain, const DeformationSpec& d) {
    const Expr factor = 1.0 + Expr::constant(d.theta) * d.g;
    require_positive_on(factor, w_var, domain, "deformation 1 + theta*g(" + w_var + ")");
    return base * factor;
}

EtaTerms eta_potential_terms(double /*xi*/, double eta) {
    const Expr q = Expr::variable("q");
    const Expr w = Expr::variable("w");
    const Expr e = Expr::constant(eta);
    return {e * expr::pow(q, 2) * expr::pow(w, 2), Expr::constant(0.5 * eta * eta) * expr::pow(q, 2) * expr::pow(w, 3)};
}

}  // namespace ncbs::geometry
