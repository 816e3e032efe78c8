// ncbs: price, compare, converge, check.

#include "ncbs/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Finite-difference pricing of geometric Black-Scholes and Merton-Garman models"};
    app.require_subcommand(1);

    ncbs::commands::Options opt;
    std::string config, out;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config, "JSON run configuration");
        if (config_required) c->required();
        sub->add_option("--out", out, "output directory (overrides output.dir)");
        sub->add_option("--seed", seed, "Monte Carlo master seed (overrides oracles.seed)");
        sub->add_flag("--quiet", opt.quiet, "print only results");
    };
    auto* price = app.add_subcommand("price", "solve the configured model and write the maturity slice");
    auto* compare = app.add_subcommand("compare", "PDE price against every enabled oracle");
    auto* converge = app.add_subcommand("converge", "temporal and spatial convergence ladders");
    auto* check = app.add_subcommand("check", "run the property suite");
    add_common(price, true);
    add_common(compare, true);
    add_common(converge, true);
    add_common(check, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ncbs::commands::kExitConfig;
    }

    auto* sub = app.get_subcommands().front();
    if (!config.empty()) opt.config = config;
    if (!out.empty()) opt.out = out;
    if (sub->count("--seed") > 0) opt.seed = seed;

    if (sub == price) return ncbs::commands::price(opt, std::cout, std::cerr);
    if (sub == compare) return ncbs::commands::compare(opt, std::cout, std::cerr);
    if (sub == converge) return ncbs::commands::converge(opt, std::cout, std::cerr);
    return ncbs::commands::check(opt, std::cout, std::cerr);
}
