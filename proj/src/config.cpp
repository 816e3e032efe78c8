#include "ncbs/config.hpp"

#include "ncbs/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ncbs::config {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    void mark(const std::string& key) { seen_.insert(key); }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(key_path(key) + ": must be finite");
        return d;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) {
            seen_.insert(key);
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    double positive(const std::string& key, double fallback) {
        const double d = number(key, fallback);
        if (!(d > 0.0)) throw ConfigError(key_path(key) + ": must be positive");
        return d;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t min) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
        const auto i = v.get<std::int64_t>();
        if (i < min) throw ConfigError(key_path(key) + ": must be >= " + std::to_string(min));
        return i;
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(key_path(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError("unknown key '" + key_path(k) + "'");
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

expr::Expr expression(Section& s, const std::string& key, const std::vector<std::string>& vars, const char* fallback) {
    std::string text = fallback;
    s.mark(key);
    if (s.has(key)) {
        const auto& v = s.raw(key);
        if (v.is_number()) {
            std::ostringstream os;
            os.precision(17);
            os << v.get<double>();
            text = os.str();
        } else if (v.is_string()) {
            text = v.get<std::string>();
        } else {
            throw ConfigError(s.key_path(key) + ": expected an expression string");
        }
    }
    try {
        return expr::parse(text, vars);
    } catch (const ParseError& e) {
        throw ConfigError(s.key_path(key) + ": " + e.what());
    }
}

geometry::Interval interval(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path + ": expected [lo, hi]");
    const geometry::Interval d{v[0].get<double>(), v[1].get<double>()};
    if (!(d.lo > 0.0 && d.hi > d.lo)) throw ConfigError(path + ": must satisfy 0 < lo < hi");
    return d;
}

void read_model(Section s, RunConfig& cfg) {
    auto& m = cfg.model;
    const auto kind_name = s.string("kind", "");
    if (kind_name.empty()) throw ConfigError("model.kind is required");
    const auto kind = models::parse_model_kind(kind_name);
    if (!kind) throw ConfigError("model.kind: unknown model '" + kind_name + "'");
    m.kind = *kind;
    const bool two = models::is_two_factor(m.kind);
    m.sigma = s.number("sigma", 0.2);
    if (!two && !(m.sigma > 0.0)) throw ConfigError("model.sigma: must be positive");
    m.r = s.optional_number("r");
    m.alpha = s.optional_number("alpha");
    m.theta = s.number("theta", 0.0);
    m.xi = s.number("xi", 0.0);
    m.eta = s.number("eta", 0.0);
    m.rho = s.number("rho", 0.0);
    m.f = expression(s, "f", {"q"}, "0");
    m.g = expression(s, "g", {"w"}, "0");
    s.mark("U");
    if (!s.has("U") || (s.raw("U").is_string() && s.raw("U").get<std::string>() == "match-BS")) {
        m.potential = models::MatchBS{};
    } else {
        m.potential = expression(s, "U", two ? std::vector<std::string>{"q", "w"} : std::vector<std::string>{"q"}, "0");
    }
    s.finish();
}

void read_instrument(Section s, RunConfig& cfg) {
    auto& in = cfg.instrument;
    const auto payoff = s.string("payoff", "call");
    const auto kind = parse_payoff_kind(payoff);
    if (!kind) throw ConfigError("instrument.payoff: expected 'call' or 'put'");
    in.payoff.kind = *kind;
    in.payoff.strike = s.positive("K", 100.0);
    in.S0 = s.positive("S0", 100.0);
    in.w0 = s.positive("w0", 0.04);
    in.T = s.positive("T", 1.0);
    s.finish();
}

void read_numerics(Section s, RunConfig& cfg) {
    auto& n = cfg.numerics;
    const bool two = models::is_two_factor(cfg.model.kind);
    const bool nc = models::is_noncommutative(cfg.model.kind);
    const auto chart = s.string("chart", two || nc ? "price" : "log");
    if (chart == "log") {
        cfg.model.chart = models::Chart::Log;
    } else if (chart == "price") {
        cfg.model.chart = models::Chart::Price;
    } else {
        throw ConfigError("numerics.chart: expected 'price' or 'log'");
    }
    n.n = static_cast<std::size_t>(s.integer("n", two ? 200 : 401, 3));
    n.n_w = static_cast<std::size_t>(s.integer("n_w", 50, 4));
    n.steps = static_cast<int>(s.integer("steps", two ? 200 : 400, 1));
    const auto scheme = solve::parse_scheme(s.string("scheme", "crank-nicolson"));
    if (!scheme) throw ConfigError("numerics.scheme: expected 'crank-nicolson' or 'implicit-euler'");
    n.scheme = *scheme;
    if (s.has("domain")) {
        const auto& d = s.raw("domain");
        if (d.is_string()) {
            if (d.get<std::string>() != "auto") throw ConfigError("numerics.domain: expected \"auto\" or an object");
        } else {
            Section ds(d, "numerics.domain");
            if (ds.has("q")) n.domain.q = interval(ds.raw("q"), "numerics.domain.q");
            if (ds.has("w")) n.domain.w = interval(ds.raw("w"), "numerics.domain.w");
            ds.finish();
        }
    } else {
        s.mark("domain");
    }
    if (s.has("checkpoints")) {
        const auto& c = s.raw("checkpoints");
        if (!c.is_array()) throw ConfigError("numerics.checkpoints: expected an array of tau values");
        for (const auto& v : c) {
            if (!v.is_number()) throw ConfigError("numerics.checkpoints: expected numbers");
            const double tau = v.get<double>();
            if (!(tau >= 0.0 && tau <= cfg.instrument.T)) throw ConfigError("numerics.checkpoints: values must lie in [0, T]");
            n.checkpoints.push_back(tau);
        }
    } else {
        s.mark("checkpoints");
    }
    s.finish();
}

void read_oracles(Section s, RunConfig& cfg) {
    auto& o = cfg.oracles;
    o.closed_form = s.boolean("closed_form", o.closed_form);
    o.heat = s.boolean("heat", o.heat);
    o.mc = s.boolean("mc", o.mc);
    o.mc_paths = static_cast<std::size_t>(s.integer("mc_paths", static_cast<std::int64_t>(o.mc_paths), 1000));
    o.mc_steps = static_cast<int>(s.integer("mc_steps", o.mc_steps, 1));
    o.seed = static_cast<std::uint64_t>(s.integer("seed", static_cast<std::int64_t>(o.seed), 0));
    o.heat_n = static_cast<std::size_t>(s.integer("heat_n", static_cast<std::int64_t>(o.heat_n), 4));
    o.heat_steps = static_cast<int>(s.integer("heat_steps", o.heat_steps, 1));
    if (s.has("tolerances")) {
        Section t(s.raw("tolerances"), "oracles.tolerances");
        o.tol_pde = t.positive("pde", o.tol_pde);
        o.tol_heat = t.positive("heat", o.tol_heat);
        o.mc_sigmas = t.positive("mc_sigmas", o.mc_sigmas);
        o.mc_rel = t.positive("mc_rel", o.mc_rel);
        t.finish();
    } else {
        s.mark("tolerances");
    }
    s.finish();
}

template <class T>
std::vector<T> integer_list(const json& v, const std::string& path, std::int64_t min) {
    if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a non-empty array of integers");
    std::vector<T> out;
    for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<std::int64_t>() < min)
            throw ConfigError(path + ": entries must be integers >= " + std::to_string(min));
        out.push_back(static_cast<T>(e.get<std::int64_t>()));
    }
    return out;
}

void read_convergence(Section s, RunConfig& cfg) {
    auto& c = cfg.convergence;
    if (s.has("temporal")) {
        Section t(s.raw("temporal"), "convergence.temporal");
        c.temporal_n = static_cast<std::size_t>(t.integer("n", static_cast<std::int64_t>(c.temporal_n), 3));
        if (t.has("steps")) c.temporal_steps = integer_list<int>(t.raw("steps"), "convergence.temporal.steps", 1);
        else t.mark("steps");
        t.finish();
    } else {
        s.mark("temporal");
    }
    if (s.has("spatial")) {
        Section t(s.raw("spatial"), "convergence.spatial");
        if (t.has("n")) c.spatial_n = integer_list<std::size_t>(t.raw("n"), "convergence.spatial.n", 3);
        else t.mark("n");
        c.spatial_steps = static_cast<int>(t.integer("steps", c.spatial_steps, 1));
        t.finish();
    } else {
        s.mark("spatial");
    }
    s.finish();
}

void read_output(Section s, RunConfig& cfg) {
    auto& o = cfg.output;
    o.dir = s.string("dir", o.dir);
    o.slice = s.string("slice", o.slice);
    o.compare = s.string("compare", o.compare);
    o.converge = s.string("converge", o.converge);
    o.check = s.string("check", o.check);
    o.report = s.string("report", o.report);
    s.finish();
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    Section root(j, "");
    if (!root.has("model")) throw ConfigError("missing required section 'model'");
    read_model(Section(root.raw("model"), "model"), cfg);
    auto section = [&](const char* name) {
        root.mark(name);
        return root.has(name) ? root.raw(name) : json::object();
    };
    read_instrument(Section(section("instrument"), "instrument"), cfg);
    read_numerics(Section(section("numerics"), "numerics"), cfg);
    read_oracles(Section(section("oracles"), "oracles"), cfg);
    read_convergence(Section(section("convergence"), "convergence"), cfg);
    read_output(Section(section("output"), "output"), cfg);
    root.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

}  // namespace ncbs::config
