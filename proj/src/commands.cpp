#include "zefoz/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "zefoz/dynamics.hpp"
#include "zefoz/eseem.hpp"
#include "zefoz/fitting.hpp"
#include "zefoz/output.hpp"
#include "zefoz/units.hpp"
#include "zefoz/zeeman.hpp"

namespace zefoz {
namespace {

using nlohmann::ordered_json;

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

bool wants_csv(const CommandOptions& o) { return o.format == "csv" || o.format == "both"; }
bool wants_json(const CommandOptions& o) { return o.format == "json" || o.format == "both"; }

ordered_json metadata(const RunConfig& config, const CommandOptions& opts,
                      const std::string& command) {
    ordered_json meta;
    meta["command"] = command;
    meta["config_digest"] = config.digest;
    meta["config_path"] = config.source_path;
    meta["seed"] = opts.seed;
    meta["version"] = kVersion;
    return meta;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

int column_index(const CsvTable& table, const std::string& name, int fallback,
                 const std::string& path) {
    if (name.empty()) {
        if (fallback >= static_cast<int>(table.header.size())) {
            throw IoError(path + ": too few columns");
        }
        return fallback;
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) return static_cast<int>(i);
    }
    throw IoError(path + ": no column named '" + name + "'");
}

void emit_summary(const char* fmt, double value) { std::printf(fmt, value); }

}  // namespace

int cmd_levels(const RunConfig& config, const CommandOptions& opts) {
    const Mat4c h = build_hamiltonian(config.system, config.level, FieldVector{});
    const EigenSystem eigs = diagonalize(h);
    const TransitionTable table = transition_table(eigs, config.system, config.level, FieldVector{});

    CsvTable csv;
    csv.header = {"lower_level", "upper_level", "frequency_hz",
                  "moment_d1_hz_per_t", "moment_d2_hz_per_t", "moment_b_hz_per_t"};
    ordered_json rows = ordered_json::array();
    bool degenerate = false;
    for (const Transition& t : table) {
        csv.rows.push_back({static_cast<double>(t.lower + 1), static_cast<double>(t.upper + 1),
                            t.frequency_hz, t.moment_hz_per_t[0], t.moment_hz_per_t[1],
                            t.moment_hz_per_t[2]});
        ordered_json r;
        r["pair"] = {t.lower + 1, t.upper + 1};
        r["frequency_mhz"] = t.frequency_hz / 1e6;
        r["moment_hz_per_t"] = {t.moment_hz_per_t[0], t.moment_hz_per_t[1], t.moment_hz_per_t[2]};
        rows.push_back(r);
        if (t.frequency_hz < 1.0) degenerate = true;
        std::printf("f(%d,%d) = %.6f MHz\n", t.lower + 1, t.upper + 1, t.frequency_hz / 1e6);
    }
    if (degenerate) std::printf("note: degenerate levels present (zero-frequency pair)\n");

    if (wants_csv(opts)) write_csv(join_path(opts.out_dir, "levels.csv"), csv);
    if (wants_json(opts)) {
        ordered_json doc = metadata(config, opts, "levels");
        doc["degenerate"] = degenerate;
        doc["transitions"] = rows;
        write_json(join_path(opts.out_dir, "levels.json"), doc);
    }
    return kExitOk;
}

int cmd_map_s1(const RunConfig& config, const CommandOptions& opts) {
    if (!config.s1_map) throw ConfigError("config: missing sweeps.s1_map block");
    const S1MapConfig& mc = *config.s1_map;

    const GradientMap map =
        s1_map(config.system, config.level, config.pair, mc.axis1, mc.axis2,
               mc.sweep1.grid(), mc.sweep2.grid(), mc.offset_tesla, opts.threads);

    CsvTable csv;
    csv.header = {axis_name(mc.axis1) + "_tesla", axis_name(mc.axis2) + "_tesla", "s1_hz_per_t"};
    for (std::size_t i = 0; i < map.axis1_tesla.size(); ++i) {
        for (std::size_t j = 0; j < map.axis2_tesla.size(); ++j) {
            csv.rows.push_back({map.axis1_tesla[i], map.axis2_tesla[j], map.at(i, j)});
        }
    }
    if (wants_csv(opts)) write_csv(join_path(opts.out_dir, "s1_map.csv"), csv);

    const double angle = s1_minimum_angle(config.system, config.level, config.pair, mc.axis1,
                                          mc.axis2, mc.angle_scan_magnitude_tesla,
                                          mc.offset_tesla);
    const double angle_deg = angle * 180.0 / kPi;
    emit_summary("minimum-gradient angle: %.3f deg\n", angle_deg);

    if (wants_json(opts)) {
        ordered_json doc = metadata(config, opts, "map-s1");
        doc["grid"] = {{"axis1", axis_name(mc.axis1)},
                       {"axis2", axis_name(mc.axis2)},
                       {"steps", {mc.sweep1.steps, mc.sweep2.steps}},
                       {"offset_tesla", mc.offset_tesla}};
        doc["min_angle_deg"] = angle_deg;
        doc["min_angle_scan_magnitude_tesla"] = mc.angle_scan_magnitude_tesla;
        write_json(join_path(opts.out_dir, "s1_map.json"), doc);
    }
    return kExitOk;
}

int cmd_map_echo(const RunConfig& config, const CommandOptions& opts) {
    if (!config.echo_map) throw ConfigError("config: missing sweeps.echo_map block");
    const EchoMapConfig& mc = *config.echo_map;

    EchoModel model;
    model.system = config.system;
    model.level = config.level;
    model.pair = config.pair;
    model.nuclei = config.nuclei;
    model.e0 = config.model.e0;
    model.t2_zero_s = config.model.t2_zero_s;
    model.kappa_hz_per_t = config.model.kappa_hz_per_t;
    model.b0_tesla = config.model.b0_tesla;
    model.mims_m = config.model.mims_m;

    const EchoMap map = echo_map(model, mc.swept_axis, mc.sweep.grid(), mc.offset_axis,
                                 mc.offset_tesla, mc.tau.grid());

    CsvTable csv;
    csv.header = {axis_name(mc.swept_axis) + "_tesla", "tau_s", "amplitude"};
    for (std::size_t i = 0; i < map.field_tesla.size(); ++i) {
        for (std::size_t j = 0; j < map.tau_s.size(); ++j) {
            csv.rows.push_back({map.field_tesla[i], map.tau_s[j], map.at(i, j)});
        }
    }
    if (wants_csv(opts)) write_csv(join_path(opts.out_dir, "echo_map.csv"), csv);
    if (wants_json(opts)) {
        ordered_json doc = metadata(config, opts, "map-echo");
        doc["grid"] = {{"swept_axis", axis_name(mc.swept_axis)},
                       {"offset_axis", axis_name(mc.offset_axis)},
                       {"offset_tesla", mc.offset_tesla},
                       {"steps", {mc.sweep.steps, mc.tau.steps}}};
        write_json(join_path(opts.out_dir, "echo_map.json"), doc);
    }
    return kExitOk;
}

int cmd_zefoz(const RunConfig& config, const CommandOptions& opts) {
    const ZefozConfig zc = config.zefoz.value_or(ZefozConfig{});

    // A synthetic bias shifts the Hamiltonian field; the search sees the
    // total field x + bias, so the applied-field minimizer recovers -bias.
    SpinSystem biased = config.system;
    const Vec3 bias = zc.bias.components();

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uni(-zc.bound_tesla, zc.bound_tesla);

    ZefozResult best;
    best.s1_norm_hz_per_t = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (int s = 0; s < zc.starts; ++s) {
        FieldVector init{uni(rng), uni(rng), uni(rng)};
        // Search in applied-field coordinates by folding the bias into the
        // objective via a shifted initial point; the library objective is
        // evaluated at the total field.
        const FieldVector total_init = FieldVector::from_components(
            {init.d1 + bias[0], init.d2 + bias[1], init.b + bias[2]});
        ZefozResult r = zefoz_search(biased, config.level, config.pair, total_init,
                                     zc.bound_tesla + norm(bias), {});
        any_converged = any_converged || r.converged;
        if (r.s1_norm_hz_per_t < best.s1_norm_hz_per_t) best = r;
    }

    const Vec3 total = best.field.components();
    const Vec3 applied{total[0] - bias[0], total[1] - bias[1], total[2] - bias[2]};
    const Vec3 recovered_bias{-applied[0], -applied[1], -applied[2]};

    std::printf("zefoz minimum: |B_total| = %.6g uT, S1 = %.6g Hz/T\n",
                best.field.magnitude() * 1e6, best.s1_norm_hz_per_t);
    if (norm(bias) > 0.0) {
        std::printf("recovered bias: (%.6g, %.6g, %.6g) uT\n", recovered_bias[0] * 1e6,
                    recovered_bias[1] * 1e6, recovered_bias[2] * 1e6);
    }

    if (wants_json(opts)) {
        ordered_json doc = metadata(config, opts, "zefoz");
        doc["starts"] = zc.starts;
        doc["bound_tesla"] = zc.bound_tesla;
        doc["field_total_tesla"] = {total[0], total[1], total[2]};
        doc["field_applied_tesla"] = {applied[0], applied[1], applied[2]};
        doc["recovered_bias_tesla"] = {recovered_bias[0], recovered_bias[1], recovered_bias[2]};
        doc["s1_norm_hz_per_t"] = best.s1_norm_hz_per_t;
        doc["converged"] = any_converged;
        write_json(join_path(opts.out_dir, "zefoz.json"), doc);
    }
    if (wants_csv(opts)) {
        CsvTable csv;
        csv.header = {"b_d1_tesla", "b_d2_tesla", "b_b_tesla", "s1_hz_per_t"};
        csv.rows.push_back({applied[0], applied[1], applied[2], best.s1_norm_hz_per_t});
        write_csv(join_path(opts.out_dir, "zefoz.csv"), csv);
    }
    return any_converged ? kExitOk : kExitNoConvergence;
}

int cmd_rabi(const RunConfig& config, const CommandOptions& opts) {
    if (!config.rabi) throw ConfigError("config: missing sweeps.rabi block");
    const RabiConfig& rc = *config.rabi;

    const RabiTrace trace = rabi_trace(2.0 * kPi * rc.rabi_frequency_hz, rc.sigma_hz,
                                       rc.time.grid(), rc.quadrature_nodes);

    CsvTable csv;
    csv.header = {"time_s", "population"};
    for (std::size_t i = 0; i < trace.time_s.size(); ++i) {
        csv.rows.push_back({trace.time_s[i], trace.population[i]});
    }
    if (wants_csv(opts)) write_csv(join_path(opts.out_dir, "rabi.csv"), csv);
    if (wants_json(opts)) {
        ordered_json doc = metadata(config, opts, "rabi");
        doc["rabi_frequency_hz"] = rc.rabi_frequency_hz;
        doc["sigma_hz"] = rc.sigma_hz;
        doc["quadrature_nodes"] = rc.quadrature_nodes;
        doc["steps"] = rc.time.steps;
        write_json(join_path(opts.out_dir, "rabi.json"), doc);
    }
    return kExitOk;
}

int cmd_eseem(const RunConfig& config, const CommandOptions& opts) {
    if (!config.eseem) throw ConfigError("config: missing sweeps.eseem block");
    if (config.nuclei.empty()) throw ConfigError("config: eseem needs a nuclei block");
    const EseemConfig& ec = *config.eseem;

    const Vec3 moment =
        transition_moment_difference(config.system, config.level, config.pair, ec.field);
    const EseemEnvelope env = two_pulse_envelope(config.nuclei, ec.field, moment, ec.tau.grid());

    CsvTable csv;
    csv.header = {"tau_s", "envelope"};
    for (std::size_t i = 0; i < env.tau_s.size(); ++i) {
        csv.rows.push_back({env.tau_s[i], env.values[i]});
    }
    if (wants_csv(opts)) write_csv(join_path(opts.out_dir, "eseem.csv"), csv);

    const double period = larmor_period(ec.field.magnitude(), config.system.gamma_host_hz_per_t);
    emit_summary("host Larmor period: %.6g s\n", period);

    if (wants_json(opts)) {
        ordered_json doc = metadata(config, opts, "eseem");
        doc["field_tesla"] = {ec.field.d1, ec.field.d2, ec.field.b};
        doc["larmor_period_s"] = period;
        doc["moment_bohr"] = {moment[0], moment[1], moment[2]};
        doc["modulation_depths"] = env.depths;
        write_json(join_path(opts.out_dir, "eseem.json"), doc);
    }
    return kExitOk;
}

int cmd_fit(const RunConfig& config, const CommandOptions& opts, const FitOptions& fit) {
    const CsvTable table = read_csv(fit.input_path);
    const int ix = column_index(table, fit.col_x, 0, fit.input_path);
    const int iy = column_index(table, fit.col_y, 1, fit.input_path);
    int is = -1;
    if (!fit.col_sigma.empty()) {
        is = column_index(table, fit.col_sigma, 2, fit.input_path);
    } else if (fit.use_sigma && table.header.size() >= 3 && fit.col_x.empty() && fit.col_y.empty()) {
        is = 2;
    }

    ordered_json doc = metadata(config, opts, "fit");
    doc["model"] = fit.model;
    doc["input_path"] = fit.input_path;
    doc["input_digest"] = file_digest(fit.input_path);

    CsvTable residuals;
    bool converged = false;

    if (fit.model == "stretched-exp") {
        DecayCurve curve;
        for (const auto& row : table.rows) {
            curve.tau_s.push_back(row[ix]);
            curve.amplitude.push_back(row[iy]);
            if (is >= 0) curve.sigma.push_back(row[is]);
        }
        StretchedExpFit result;
        try {
            result = fit_stretched_exponential(curve);
        } catch (const std::invalid_argument& e) {
            throw IoError(fit.input_path + ": " + e.what());
        }
        converged = result.converged;
        doc["parameters"] = {
            {"e0", {{"value", result.e0}, {"sigma", std::sqrt(result.covariance[0][0])}}},
            {"t2_s", {{"value", result.t2_s}, {"sigma", std::sqrt(result.covariance[1][1])}}},
            {"mims_m", {{"value", result.mims_m}, {"sigma", std::sqrt(result.covariance[2][2])}}}};
        doc["residual_norm"] = result.residual_norm;
        doc["iterations"] = result.iterations;
        doc["converged"] = result.converged;
        std::printf("stretched-exp: E0 = %.6g, T2 = %.6g ms, m = %.6g\n", result.e0,
                    result.t2_s * 1e3, result.mims_m);

        residuals.header = {"tau_s", "amplitude", "model", "residual"};
        for (std::size_t i = 0; i < curve.tau_s.size(); ++i) {
            const double m =
                stretched_exp_model(curve.tau_s[i], result.e0, result.t2_s, result.mims_m);
            residuals.rows.push_back({curve.tau_s[i], curve.amplitude[i], m,
                                      curve.amplitude[i] - m});
        }
    } else if (fit.model == "t2-field") {
        std::vector<T2FieldPoint> points;
        for (const auto& row : table.rows) {
            points.push_back({row[ix], row[iy], is >= 0 ? row[is] : 0.0});
        }
        T2FieldFit result;
        try {
            result = fit_t2_vs_field(points);
        } catch (const std::invalid_argument& e) {
            throw IoError(fit.input_path + ": " + e.what());
        }
        converged = result.converged;
        doc["parameters"] = {
            {"t2_zero_s",
             {{"value", result.t2_zero_s}, {"sigma", std::sqrt(result.covariance[0][0])}}},
            {"kappa_hz_per_t",
             {{"value", result.kappa_hz_per_t}, {"sigma", std::sqrt(result.covariance[1][1])}}},
            {"b0_tesla", {{"value", result.b0_tesla},
                          {"sigma", result.b0_fixed ? 0.0 : std::sqrt(result.covariance[2][2])},
                          {"fixed", result.b0_fixed}}}};
        doc["residual_norm"] = result.residual_norm;
        doc["iterations"] = result.iterations;
        doc["converged"] = result.converged;
        std::printf("t2-field: T2(0) = %.6g ms, kappa = %.6g MHz/T, B0 = %.6g uT%s\n",
                    result.t2_zero_s * 1e3, result.kappa_hz_per_t / 1e6, result.b0_tesla * 1e6,
                    result.b0_fixed ? " (B0 fixed: data spans one side only)" : "");

        residuals.header = {"b_tesla", "t2_s", "model", "residual"};
        for (const auto& p : points) {
            const double m =
                t2_field_model(p.b_tesla, result.t2_zero_s, result.kappa_hz_per_t, result.b0_tesla);
            residuals.rows.push_back({p.b_tesla, p.t2_s, m, p.t2_s - m});
        }
    } else {
        throw ConfigError("config: unknown fit model '" + fit.model +
                          "' (expected stretched-exp or t2-field)");
    }

    if (wants_json(opts)) write_json(join_path(opts.out_dir, "fit_report.json"), doc);
    if (wants_csv(opts)) write_csv(join_path(opts.out_dir, "fit_residuals.csv"), residuals);
    return converged ? kExitOk : kExitNoConvergence;
}

}  // namespace zefoz
