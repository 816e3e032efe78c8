#pragma once

// The four CLI commands. Each returns the process exit code:
// 0 ok, 2 configuration error, 3 numerical failure (or a failed gate),
// 4 model constraint violation.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ncbs::commands {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerics = 3;
inline constexpr int kExitModel = 4;

struct Options {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> out;  ///< overrides output.dir
    std::optional<std::uint64_t> seed;         ///< overrides oracles.seed
    bool quiet = false;
};

int price(const Options& opt, std::ostream& out, std::ostream& err);
int compare(const Options& opt, std::ostream& out, std::ostream& err);
int converge(const Options& opt, std::ostream& out, std::ostream& err);
/// The config is optional; without one the CSV goes to --out (or nowhere).
int check(const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace ncbs::commands
