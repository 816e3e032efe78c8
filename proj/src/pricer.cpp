#include "ncbs/pricer.hpp"

#include "ncbs/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace ncbs::pricer {

using models::Chart;

geometry::Interval default_q_domain(Chart chart, const Instrument& inst, double sigma) {
    if (chart == Chart::Log) {
        const double half = 6.0 * sigma * std::sqrt(inst.T);
        return {inst.S0 * std::exp(-half), inst.S0 * std::exp(half)};
    }
    return {inst.payoff.strike / 8.0, 8.0 * inst.payoff.strike};
}

geometry::Interval default_w_domain(const Instrument& inst) { return {0.1 * inst.w0, 10.0 * inst.w0}; }

namespace {

void check_instrument(const Instrument& inst, bool two_factor) {
    if (!(inst.S0 > 0.0)) throw ConfigError("S0 must be positive");
    if (!(inst.payoff.strike > 0.0)) throw ConfigError("K must be positive");
    if (!(inst.T > 0.0)) throw ConfigError("T must be positive");
    if (two_factor && !(inst.w0 > 0.0)) throw ConfigError("w0 must be positive");
}

void check_domain(const geometry::Interval& d, const char* axis) {
    if (!(d.lo > 0.0 && d.hi > d.lo && std::isfinite(d.hi)))
        throw ConfigError(std::string("domain.") + axis + " must satisfy 0 < lo < hi");
}

struct Prepared {
    models::ModelSpec spec;
    geometry::Interval q;
    geometry::Interval w;
};

Prepared prepare(models::ModelSpec spec, const Instrument& inst, const Numerics& num) {
    const bool two = models::is_two_factor(spec.kind);
    check_instrument(inst, two);
    Prepared p;
    p.q = num.domain.q.value_or(default_q_domain(two ? Chart::Price : spec.chart, inst, spec.sigma));
    check_domain(p.q, "q");
    p.w = num.domain.w.value_or(default_w_domain(inst));
    if (two) check_domain(p.w, "w");
    spec.q_domain = p.q;
    spec.w_domain = p.w;
    p.spec = std::move(spec);
    return p;
}

discretize::Grid1D axis_grid(Chart chart, const geometry::Interval& d, std::size_t n) {
    if (chart == Chart::Log) return discretize::make_grid(Chart::Log, std::log(d.lo), std::log(d.hi), n);
    return discretize::make_grid(Chart::Price, d.lo, d.hi, n);
}

}  // namespace

models::ModelSpec on_domain(models::ModelSpec spec, const Instrument& inst, const Numerics& num) {
    return prepare(std::move(spec), inst, num).spec;
}

discretize::BandedOperator1D assemble_1d(const models::ModelSpec& spec, const Instrument& inst, const Numerics& num) {
    const auto p = prepare(spec, inst, num);
    if (models::is_two_factor(p.spec.kind)) throw std::invalid_argument("assemble_1d: one-factor models only");
    const auto gen = models::build_generator(p.spec);
    const auto grid = axis_grid(p.spec.chart, p.q, num.n);
    return discretize::assemble_1d(gen, grid, discretize::default_boundaries(inst.payoff, gen, grid));
}

discretize::BandedOperator2D assemble_2d(const models::ModelSpec& spec, const Instrument& inst, const Numerics& num) {
    const auto p = prepare(spec, inst, num);
    if (!models::is_two_factor(p.spec.kind)) throw std::invalid_argument("assemble_2d: two-factor models only");
    const auto gen = models::build_generator(p.spec);
    const auto grid = discretize::make_grid_2d(p.q.lo, p.q.hi, num.n, p.w.lo, p.w.hi, num.n_w);
    return discretize::assemble_2d(gen, grid, discretize::default_boundaries(inst.payoff, gen, grid));
}

PriceResult price(models::ModelSpec spec, const Instrument& inst, const Numerics& num) {
    auto p = prepare(std::move(spec), inst, num);
    PriceResult out;
    out.q_domain = p.q;
    out.w_domain = p.w;
    out.generator = models::build_generator(p.spec);
    const solve::EvolveOptions opt{inst.T, num.steps, num.scheme, 2, num.checkpoints};

    if (out.generator.dimension == 1) {
        const auto grid = axis_grid(p.spec.chart, p.q, num.n);
        const auto op =
            discretize::assemble_1d(out.generator, grid, discretize::default_boundaries(inst.payoff, out.generator, grid));
        out.max_peclet = discretize::max_cell_peclet(op);
        out.surface = solve::evolve_1d(op, discretize::sample_payoff(inst.payoff, grid), opt);
        out.price = solve::interpolate(out.surface, inst.S0);
    } else {
        const auto grid = discretize::make_grid_2d(p.q.lo, p.q.hi, num.n, p.w.lo, p.w.hi, num.n_w);
        const auto op =
            discretize::assemble_2d(out.generator, grid, discretize::default_boundaries(inst.payoff, out.generator, grid));
        out.max_peclet = discretize::max_cell_peclet(op);
        out.surface = solve::evolve_2d(op, discretize::sample_payoff(inst.payoff, grid), opt);
        out.price = solve::interpolate(out.surface, inst.S0, inst.w0);
    }
    return out;
}

}  // namespace ncbs::pricer
