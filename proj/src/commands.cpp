#include "ncbs/commands.hpp"

#include "ncbs/checks.hpp"
#include "ncbs/config.hpp"
#include "ncbs/errors.hpp"
#include "ncbs/oracles.hpp"
#include "ncbs/pricer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace ncbs::commands {

namespace fs = std::filesystem;
using config::RunConfig;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Context {
    RunConfig cfg;
    fs::path dir;
};

Context load(const Options& opt) {
    if (!opt.config) throw ConfigError("--config is required for this command");
    Context ctx{config::load_config(*opt.config), {}};
    if (opt.seed) ctx.cfg.oracles.seed = *opt.seed;
    ctx.dir = opt.out ? *opt.out : fs::path(ctx.cfg.output.dir);
    return ctx;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "' (output.dir)");
    return f;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return kExitModel;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerics;
    } catch (const DomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerics;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerics;
    }
}

/// Black-Scholes parameters when the configured model reproduces it.
struct BsReference {
    double sigma;
    double r;
};

std::optional<BsReference> bs_reference(const RunConfig& cfg) {
    const auto& m = cfg.model;
    if (!models::is_bs_family(m.kind) || !std::holds_alternative<models::MatchBS>(m.potential)) return std::nullopt;
    if (models::is_noncommutative(m.kind) && m.theta != 0.0) return std::nullopt;
    return BsReference{m.sigma, *models::matched_rate(m)};
}

/// Constant discount rate of an MG model, when it has one.
std::optional<double> mg_rate(const RunConfig& cfg) {
    const auto& m = cfg.model;
    if (m.kind != models::ModelKind::MG) return std::nullopt;
    if (std::holds_alternative<models::MatchBS>(m.potential)) return m.r;
    const auto& U = std::get<expr::Expr>(m.potential);
    if (U.kind() == expr::Kind::Constant) return U.constant_value();
    return std::nullopt;
}

void describe_model(std::ostream& os, const RunConfig& cfg) {
    const auto& m = cfg.model;
    os << "model: " << models::to_string(m.kind) << '\n';
    if (models::is_bs_family(m.kind)) os << "sigma: " << num(m.sigma) << '\n';
    if (m.r) os << "r: " << num(*m.r) << '\n';
    if (models::is_bs_family(m.kind)) os << "alpha (effective): " << num(models::effective_alpha(m)) << '\n';
    if (models::is_noncommutative(m.kind)) {
        os << "theta: " << num(m.theta) << "\nf(q): " << expr::to_string(m.f) << '\n';
        if (models::is_two_factor(m.kind)) os << "g(w): " << expr::to_string(m.g) << "\neta: " << num(m.eta) << '\n';
    }
    if (models::is_two_factor(m.kind)) os << "xi: " << num(m.xi) << '\n';
    os << "U: "
       << (std::holds_alternative<models::MatchBS>(m.potential) ? std::string("match-BS")
                                                                 : expr::to_string(std::get<expr::Expr>(m.potential)))
       << '\n';
    os << "convention: " << models::wick_sign_convention() << '\n';
    const auto& in = cfg.instrument;
    os << "instrument: " << to_string(in.payoff.kind) << " K=" << num(in.payoff.strike) << " S0=" << num(in.S0);
    if (models::is_two_factor(m.kind)) os << " w0=" << num(in.w0);
    os << " T=" << num(in.T) << '\n';
}

void describe_numerics(std::ostream& os, const RunConfig& cfg, const pricer::PriceResult& res) {
    const auto& g = res.generator;
    os << "chart: " << models::to_string(g.chart) << '\n';
    os << "a2: " << expr::to_string(g.a2) << "\na1: " << expr::to_string(g.a1) << "\na0: " << expr::to_string(g.a0) << '\n';
    if (g.dimension == 2) os << "b2: " << expr::to_string(g.b2) << "\nb1: " << expr::to_string(g.b1) << '\n';
    os << "q domain: [" << num(res.q_domain.lo) << ", " << num(res.q_domain.hi) << "], nodes " << cfg.numerics.n << '\n';
    if (g.dimension == 2)
        os << "w domain: [" << num(res.w_domain.lo) << ", " << num(res.w_domain.hi) << "], nodes " << cfg.numerics.n_w << '\n';
    os << "steps: " << res.surface.steps << ", scheme: " << solve::to_string(res.surface.scheme) << '\n';
    os << "boundaries: " << res.surface.boundary_summary << '\n';
    os << "max cell Peclet: " << num(res.max_peclet) << '\n';
}

void warn_peclet(std::ostream& err, const pricer::PriceResult& res) {
    if (res.max_peclet > 1.0)
        err << "warning: cell Peclet number " << num(res.max_peclet)
            << " exceeds 1; central differences may oscillate, refine the grid\n";
}

void write_slice(std::ostream& f, const solve::PriceSurface& s) {
    const auto& v = s.final_values();
    if (s.dimension == 1) {
        f << "q,value\n";
        for (std::size_t i = 0; i < s.grid.size(); ++i) f << num(s.grid.price_at(i)) << ',' << num(v[i]) << '\n';
        return;
    }
    f << "q,w,value\n";
    for (std::size_t j = 0; j < s.w_grid.size(); ++j)
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            f << num(s.grid.nodes[i]) << ',' << num(s.w_grid.nodes[j]) << ',' << num(v[j * s.grid.size() + i]) << '\n';
}

struct Row {
    std::string method;
    double price = kNaN;
    double reference = kNaN;
    double stderr_ = kNaN;
    std::optional<double> gate;  ///< allowed |price - reference|
};

}  // namespace

int price(const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto ctx = load(opt);
        const auto& cfg = ctx.cfg;
        const auto res = pricer::price(cfg.model, cfg.instrument, cfg.numerics);
        warn_peclet(err, res);
        {
            auto f = open_output(ctx.dir, cfg.output.slice);
            write_slice(f, res.surface);
        }
        std::ostringstream report;
        report << "command: price\n";
        describe_model(report, cfg);
        describe_numerics(report, cfg, res);
        report << "price: " << num(res.price) << '\n';
        if (const auto ref = bs_reference(cfg)) {
            const double cf = oracles::bs_closed_form(cfg.instrument.S0, cfg.instrument.payoff.strike, ref->r, ref->sigma,
                                                      cfg.instrument.T, cfg.instrument.payoff.kind);
            report << "closed form: " << num(cf) << " (relative difference " << num(std::abs(res.price - cf) / cf) << ")\n";
        }
        {
            auto f = open_output(ctx.dir, cfg.output.report);
            f << report.str();
        }
        if (opt.quiet) out << num(res.price) << '\n';
        else out << report.str();
        return kExitOk;
    });
}

int compare(const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto ctx = load(opt);
        const auto& cfg = ctx.cfg;
        const auto& in = cfg.instrument;
        const auto& o = cfg.oracles;
        const auto res = pricer::price(cfg.model, in, cfg.numerics);
        warn_peclet(err, res);

        std::vector<Row> rows;
        std::ostringstream notes;
        if (const auto ref = bs_reference(cfg)) {
            const double cf = oracles::bs_closed_form(in.S0, in.payoff.strike, ref->r, ref->sigma, in.T, in.payoff.kind);
            if (o.closed_form) {
                rows.push_back({"pde", res.price, cf, kNaN, o.tol_pde * cf});
                rows.push_back({"closed_form", cf, cf, kNaN, std::nullopt});
            } else {
                rows.push_back({"pde", res.price, kNaN, kNaN, std::nullopt});
            }
            if (o.heat) {
                const double h = oracles::heat_transform_price(in.S0, in.payoff, ref->r, ref->sigma, in.T, o.heat_n, o.heat_steps);
                rows.push_back({"heat", h, cf, kNaN, o.tol_heat * cf});
            }
            if (o.mc) {
                const auto mc = oracles::mc_gbm_price(in.S0, in.payoff.strike, ref->r, ref->sigma, in.T, o.mc_paths, o.seed,
                                                      in.payoff.kind);
                rows.push_back({"mc_gbm", mc.price, cf, mc.stderr_, std::max(o.mc_sigmas * mc.stderr_, o.mc_rel * cf)});
            }
        } else if (const auto r = mg_rate(cfg); r && o.mc) {
            const auto mc = oracles::mc_mg_price(in.S0, in.w0, in.payoff.strike, *r, cfg.model.xi, in.T, o.mc_paths,
                                                 o.mc_steps, o.seed, in.payoff.kind, res.w_domain.lo);
            const double gate = std::max(o.mc_sigmas * mc.stderr_, o.mc_rel * res.price);
            rows.push_back({"pde", res.price, mc.price, kNaN, gate});
            rows.push_back({"mc_mg", mc.price, res.price, mc.stderr_, gate});
        } else {
            rows.push_back({"pde", res.price, kNaN, kNaN, std::nullopt});
            notes << "note: no independent oracle is enabled for this model; only the PDE price is reported\n";
        }

        bool all_pass = true;
        std::ostringstream csv, table, report;
        csv << "method,price,reference,abs_err,rel_err,stderr\n";
        table << std::left << std::setw(13) << "method" << std::setw(20) << "price" << std::setw(20) << "reference"
              << std::setw(22) << "abs_err" << std::setw(22) << "rel_err" << std::setw(20) << "stderr" << "gate\n";
        for (const auto& row : rows) {
            const double abs_err = std::abs(row.price - row.reference);
            const double rel_err = abs_err / std::abs(row.reference);
            csv << row.method << ',' << num(row.price) << ',' << (std::isnan(row.reference) ? "" : num(row.reference)) << ','
                << (std::isnan(row.reference) ? "" : num(abs_err)) << ',' << (std::isnan(row.reference) ? "" : num(rel_err))
                << ',' << (std::isnan(row.stderr_) ? "" : num(row.stderr_)) << '\n';
            std::string verdict = "-";
            if (row.gate) {
                const bool pass = abs_err <= *row.gate;
                all_pass = all_pass && pass;
                verdict = std::string(pass ? "PASS" : "FAIL") + " (<= " + num(*row.gate) + ")";
            }
            table << std::left << std::setw(13) << row.method << std::setw(20) << num(row.price) << std::setw(20)
                  << num(row.reference) << std::setw(22) << num(abs_err) << std::setw(22) << num(rel_err) << std::setw(20)
                  << num(row.stderr_) << verdict << '\n';
        }
        {
            auto f = open_output(ctx.dir, cfg.output.compare);
            f << csv.str();
        }
        report << "command: compare\n";
        describe_model(report, cfg);
        describe_numerics(report, cfg, res);
        report << "seed: " << o.seed << '\n' << notes.str() << table.str();
        report << "result: " << (all_pass ? "all gates pass" : "gate failure") << '\n';
        {
            auto f = open_output(ctx.dir, cfg.output.report);
            f << report.str();
        }
        if (!opt.quiet) out << table.str() << notes.str();
        out << (all_pass ? "compare: PASS\n" : "compare: FAIL\n");
        return all_pass ? kExitOk : kExitNumerics;
    });
}

int converge(const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto ctx = load(opt);
        const auto& cfg = ctx.cfg;
        const auto& c = cfg.convergence;
        std::optional<double> reference;
        if (const auto ref = bs_reference(cfg))
            reference = oracles::bs_closed_form(cfg.instrument.S0, cfg.instrument.payoff.strike, ref->r, ref->sigma,
                                                cfg.instrument.T, cfg.instrument.payoff.kind);
        auto run = [&](std::size_t n, int steps) {
            auto numerics = cfg.numerics;
            numerics.n = n;
            numerics.steps = steps;
            numerics.checkpoints.clear();
            return pricer::price(cfg.model, cfg.instrument, numerics).price;
        };
        std::vector<std::pair<std::size_t, int>> temporal, spatial;
        for (int s : c.temporal_steps) temporal.push_back({c.temporal_n, s});
        for (std::size_t n : c.spatial_n) spatial.push_back({n, c.spatial_steps});

        std::ostringstream csv, table;
        csv << "study,n,steps,price,reference,error,ratio,order\n";
        table << std::left << std::setw(10) << "study" << std::setw(8) << "n" << std::setw(8) << "steps" << std::setw(20)
              << "price" << std::setw(22) << "error" << std::setw(20) << "ratio" << "order\n";
        for (const auto& [name, ladder] : {std::pair{"temporal", temporal}, std::pair{"spatial", spatial}}) {
            for (const auto& row : solve::convergence_study(run, ladder, reference)) {
                csv << name << ',' << row.n << ',' << row.steps << ',' << num(row.price) << ',' << num(row.reference) << ','
                    << num(row.error) << ',' << num(row.ratio) << ',' << num(row.order) << '\n';
                table << std::left << std::setw(10) << name << std::setw(8) << row.n << std::setw(8) << row.steps
                      << std::setw(20) << num(row.price) << std::setw(22) << num(row.error) << std::setw(20) << num(row.ratio)
                      << num(row.order) << '\n';
            }
        }
        {
            auto f = open_output(ctx.dir, cfg.output.converge);
            f << csv.str();
        }
        {
            auto f = open_output(ctx.dir, cfg.output.report);
            f << "command: converge\n";
            describe_model(f, cfg);
            f << "reference: " << (reference ? "closed form " + num(*reference) : std::string("Richardson extrapolation"))
              << '\n'
              << table.str();
        }
        if (!opt.quiet) out << table.str();
        return kExitOk;
    });
}

int check(const Options& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::optional<fs::path> dir = opt.out;
        std::string name = "check.csv";
        if (opt.config) {
            auto ctx = load(opt);
            dir = ctx.dir;
            name = ctx.cfg.output.check;
        }
        const auto results = checks::run_property_suite();
        bool all_pass = true;
        std::ostringstream csv;
        csv << "name,pass,value,threshold\n";
        for (const auto& r : results) {
            all_pass = all_pass && r.pass;
            csv << r.name << ',' << (r.pass ? "true" : "false") << ',' << num(r.value) << ',' << num(r.threshold) << '\n';
            if (!opt.quiet || !r.pass)
                out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(52) << r.name << std::setw(22) << num(r.value)
                    << "threshold " << num(r.threshold) << '\n';
        }
        if (dir) {
            auto f = open_output(*dir, name);
            f << csv.str();
        }
        out << (all_pass ? "check: all properties pass\n" : "check: FAILURES\n");
        return all_pass ? kExitOk : kExitNumerics;
    });
}

}  // namespace ncbs::commands
