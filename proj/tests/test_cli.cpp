#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ncbs/config.hpp"
#include "ncbs/errors.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace ncbs;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("ncbs_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
    const auto p = scratch() / name;
    std::ofstream(p) << body;
    return p;
}

Run cli(const std::string& args) {
    const auto out = scratch() / "stdout.txt";
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + NCBS_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

const char* kBs2 = R"({
  "model": {"kind": "BS2", "sigma": 0.2, "r": 0.05, "U": "match-BS"},
  "instrument": {"payoff": "call", "K": 100, "S0": 100, "T": 1},
  "numerics": {"n": 401, "steps": 400},
  "oracles": {"mc": true, "mc_paths": 20000}
})";

}  // namespace

TEST_CASE("BS1 with a rate other than sigma^2/2 is a model error") {
    const auto cfg = write_config("bs1_bad.json", R"({
      "model": {"kind": "BS1", "sigma": 0.2, "r": 0.05, "U": "match-BS"},
      "instrument": {"payoff": "call", "K": 100}
    })");
    const auto r = cli("price --config \"" + cfg.string() + "\" --out \"" + (scratch() / "o1").string() + "\"");
    CHECK(r.code == 4);
    CHECK(r.err.find("sigma^2/2") != std::string::npos);
}

TEST_CASE("BS2 price") {
    const auto cfg = write_config("bs2.json", kBs2);
    const auto r = cli("price --quiet --config \"" + cfg.string() + "\" --out \"" + (scratch() / "o2").string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out) == doctest::Approx(10.4506).epsilon(5e-3));
    const auto slice = slurp(scratch() / "o2" / "slice.csv");
    CHECK(slice.rfind("q,value\n", 0) == 0);
}

TEST_CASE("malformed expressions report the offset") {
    const auto cfg = write_config("bad_expr.json", R"({
      "model": {"kind": "BS2", "sigma": 0.2, "r": 0.05, "U": "q+*2"},
      "instrument": {"payoff": "call", "K": 100}
    })");
    const auto r = cli("price --config \"" + cfg.string() + "\" --out \"" + (scratch() / "o3").string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("model.U") != std::string::npos);
    CHECK(r.err.find("offset 2") != std::string::npos);
}

TEST_CASE("configuration errors") {
    const auto cfg = write_config("unknown.json", R"({
      "model": {"kind": "BS2", "sigma": 0.2, "r": 0.05, "U": "match-BS", "sigmaa": 1},
      "instrument": {"payoff": "call", "K": 100}
    })");
    const auto r = cli("price --config \"" + cfg.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("model.sigmaa") != std::string::npos);
    CHECK(cli("price --config \"" + (scratch() / "missing.json").string() + "\"").code == 2);
    CHECK(cli("price").code == 2);
    CHECK(cli("bogus").code == 2);

    CHECK_THROWS_AS(config::parse_config("{\"model\": {\"kind\": \"XX\"}}"), ConfigError);
    CHECK_THROWS_AS(config::parse_config("[1, 2"), ConfigError);
    CHECK_THROWS_AS(config::parse_config(R"({"model": {"kind": "BS2", "r": 0.05}, "numerics": {"n": 2}})"), ConfigError);
    const auto ok = config::parse_config(R"({"model": {"kind": "MG", "xi": 0.5, "r": 0.02}})");
    CHECK(ok.numerics.n == 200);
    CHECK(ok.numerics.steps == 200);
    CHECK(ok.model.chart == models::Chart::Price);
}

TEST_CASE("compare and check") {
    const auto cfg = write_config("bs2_cmp.json", kBs2);
    const auto r = cli("compare --config \"" + cfg.string() + "\" --out \"" + (scratch() / "o4").string() + "\"");
    CHECK(r.code == 0);
    const auto csv = slurp(scratch() / "o4" / "compare.csv");
    CHECK(csv.rfind("method,price,reference,abs_err,rel_err,stderr\n", 0) == 0);
    CHECK(csv.find("heat,") != std::string::npos);
    CHECK(csv.find("mc_gbm,") != std::string::npos);

    const auto mg = write_config("mg.json", R"({
      "model": {"kind": "MG", "xi": 0.5, "r": 0.02},
      "instrument": {"payoff": "call", "K": 100, "w0": 0.04},
      "oracles": {"mc": true, "mc_paths": 20000, "mc_steps": 100}
    })");
    CHECK(cli("compare --config \"" + mg.string() + "\" --out \"" + (scratch() / "o5").string() + "\"").code == 0);

    const auto c = cli("check --out \"" + (scratch() / "o6").string() + "\"");
    CHECK(c.code == 0);
    CHECK(slurp(scratch() / "o6" / "check.csv").rfind("name,pass,value,threshold\n", 0) == 0);
}

TEST_CASE("repeated runs are byte-identical") {
    const auto cfg = write_config("bs2_rep.json", kBs2);
    for (const char* dir : {"r1", "r2"}) {
        const std::string tail = " --quiet --config \"" + cfg.string() + "\" --out \"" + (scratch() / dir).string() + "\"";
        REQUIRE(cli("compare" + tail).code == 0);
        REQUIRE(cli("price" + tail).code == 0);
    }
    for (const char* f : {"compare.csv", "slice.csv"}) {
        const auto a = slurp(scratch() / "r1" / f);
        CHECK(!a.empty());
        CHECK(a == slurp(scratch() / "r2" / f));
    }
}
