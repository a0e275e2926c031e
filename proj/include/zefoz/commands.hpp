#pragma once

#include <string>

#include "zefoz/config.hpp"

namespace zefoz {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitInputError = 3,
    kExitNoConvergence = 4,
};

struct CommandOptions {
    std::string out_dir = ".";
    std::string format = "both";   // csv | json | both
    int threads = 1;
    std::uint64_t seed = 1;
};

struct FitOptions {
    std::string input_path;
    std::string model = "stretched-exp";   // stretched-exp | t2-field
    // Column mapping; empty means positional (x, y[, sigma]).
    std::string col_x;
    std::string col_y;
    std::string col_sigma;
    bool use_sigma = true;
};

int cmd_levels(const RunConfig& config, const CommandOptions& opts);
int cmd_map_s1(const RunConfig& config, const CommandOptions& opts);
int cmd_map_echo(const RunConfig& config, const CommandOptions& opts);
int cmd_zefoz(const RunConfig& config, const CommandOptions& opts);
int cmd_rabi(const RunConfig& config, const CommandOptions& opts);
int cmd_eseem(const RunConfig& config, const CommandOptions& opts);
int cmd_fit(const RunConfig& config, const CommandOptions& opts, const FitOptions& fit);

}  // namespace zefoz
