#pragma once

// Run configuration (JSON). Unknown keys are rejected with their full path.

#include "ncbs/models.hpp"
#include "ncbs/pricer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ncbs::config {

struct OracleOptions {
    bool closed_form = true;
    bool heat = true;
    bool mc = false;
    std::size_t mc_paths = 200000;
    int mc_steps = 200;
    std::uint64_t seed = 42;
    std::size_t heat_n = 401;
    int heat_steps = 400;
    double tol_pde = 5e-3;    ///< relative, PDE vs closed form
    double tol_heat = 1e-2;   ///< relative, heat transform vs closed form
    double mc_sigmas = 3.0;   ///< MC gate: max(mc_sigmas * stderr, mc_rel * reference)
    double mc_rel = 0.02;
};

struct ConvergenceOptions {
    std::size_t temporal_n = 8001;
    std::vector<int> temporal_steps{10, 20, 40, 80};
    std::vector<std::size_t> spatial_n{101, 201, 401, 801};
    int spatial_steps = 2000;
};

struct OutputOptions {
    std::string dir = "out";
    std::string slice = "slice.csv";
    std::string compare = "compare.csv";
    std::string converge = "converge.csv";
    std::string check = "check.csv";
    std::string report = "report.txt";
};

struct RunConfig {
    models::ModelSpec model;
    pricer::Instrument instrument;
    pricer::Numerics numerics;
    OracleOptions oracles;
    ConvergenceOptions convergence;
    OutputOptions output;
};

/// Throws ConfigError (naming the key) for malformed input.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ncbs::config
