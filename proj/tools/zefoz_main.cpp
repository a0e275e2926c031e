#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <system_error>

#include "CLI11.hpp"
#include "zefoz/commands.hpp"
#include "zefoz/output.hpp"

namespace {

struct Cli {
    std::string config_path;
    zefoz::CommandOptions opts;
    zefoz::FitOptions fit;
};

void add_common(CLI::App* cmd, Cli& cli, bool config_required = true) {
    cmd->add_option("--config", cli.config_path, "Run configuration file (JSON)")
        ->required(config_required);
    cmd->add_option("--out", cli.opts.out_dir, "Output directory");
    cmd->add_option("--format", cli.opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--threads", cli.opts.threads, "Worker threads for map generation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cli.opts.seed, "Seed for randomized starts");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-Hamiltonian clock-transition toolkit"};
    app.require_subcommand(1);

    Cli cli;
    CLI::App* levels = app.add_subcommand("levels", "Zero-field transition table");
    CLI::App* map_s1 = app.add_subcommand("map-s1", "Transition-gradient map over a field plane");
    CLI::App* map_echo = app.add_subcommand("map-echo", "Echo-decay map over a swept field axis");
    CLI::App* zefoz_cmd = app.add_subcommand("zefoz", "Search for the zero-gradient field point");
    CLI::App* rabi = app.add_subcommand("rabi", "Broadened Rabi oscillation trace");
    CLI::App* eseem = app.add_subcommand("eseem", "Two-pulse echo-modulation envelope");
    CLI::App* fit = app.add_subcommand("fit", "Fit decay curves or coherence-time data");
    for (CLI::App* cmd : {levels, map_s1, map_echo, zefoz_cmd, rabi, eseem, fit}) {
        add_common(cmd, cli);
    }
    fit->add_option("--input", cli.fit.input_path, "Input CSV file")->required();
    fit->add_option("--model", cli.fit.model, "Fit model")
        ->check(CLI::IsMember({"stretched-exp", "t2-field"}));
    fit->add_option("--col-x", cli.fit.col_x, "Column name for the abscissa (tau_s or B_T)");
    fit->add_option("--col-y", cli.fit.col_y, "Column name for the ordinate (amplitude or T2_s)");
    fit->add_option("--col-sigma", cli.fit.col_sigma, "Column name for per-point uncertainties");
    fit->add_flag("--no-sigma", [&cli](std::int64_t) { cli.fit.use_sigma = false; },
                  "Ignore a third column instead of using it as sigma");

    CLI11_PARSE(app, argc, argv);

    try {
        std::error_code ec;
        std::filesystem::create_directories(cli.opts.out_dir, ec);
        if (ec) throw zefoz::IoError("cannot create output directory '" + cli.opts.out_dir +
                                     "': " + ec.message());
        const zefoz::RunConfig config = zefoz::load_config(cli.config_path);
        if (levels->parsed()) return zefoz::cmd_levels(config, cli.opts);
        if (map_s1->parsed()) return zefoz::cmd_map_s1(config, cli.opts);
        if (map_echo->parsed()) return zefoz::cmd_map_echo(config, cli.opts);
        if (zefoz_cmd->parsed()) return zefoz::cmd_zefoz(config, cli.opts);
        if (rabi->parsed()) return zefoz::cmd_rabi(config, cli.opts);
        if (eseem->parsed()) return zefoz::cmd_eseem(config, cli.opts);
        if (fit->parsed()) return zefoz::cmd_fit(config, cli.opts, cli.fit);
    } catch (const zefoz::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return zefoz::kExitConfigError;
    } catch (const zefoz::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return zefoz::kExitInputError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return zefoz::kExitConfigError;
    }
    return zefoz::kExitOk;
}
