#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zefoz/dynamics.hpp"
#include "zefoz/eseem.hpp"
#include "zefoz/spin_core.hpp"

namespace zefoz {

/// Thrown for malformed or incomplete run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    double start = 0.0;   // Tesla or seconds depending on context
    double stop = 0.0;
    int steps = 0;

    std::vector<double> grid() const;
};

struct S1MapConfig {
    Axis axis1 = Axis::d1;
    Axis axis2 = Axis::d2;
    SweepSpec sweep1;
    SweepSpec sweep2;
    double offset_tesla = 0.0;
    // Angular-minimum report settings.
    double angle_scan_magnitude_tesla = 200e-6;
};

struct EchoMapConfig {
    Axis swept_axis = Axis::d2;
    SweepSpec sweep;          // Tesla
    Axis offset_axis = Axis::d1;
    double offset_tesla = 0.0;
    SweepSpec tau;            // seconds
};

struct EseemConfig {
    FieldVector field;
    SweepSpec tau;            // seconds
};

struct RabiConfig {
    double rabi_frequency_hz = 560e3;   // nu; omega = 2 pi nu
    double sigma_hz = 680e3;
    SweepSpec time;           // seconds
    int quadrature_nodes = 512;
};

struct ZefozConfig {
    double bound_tesla = 500e-6;
    int starts = 10;
    FieldVector bias;         // added to the Hamiltonian field: search
                              // recovers -bias as its minimizer offset
};

struct ModelConfig {
    double e0 = 1.0;
    double t2_zero_s = 10.3e-3;
    double kappa_hz_per_t = 1.48e6;
    double b0_tesla = 0.0;
    double mims_m = 1.0;
};

/// Parsed run configuration; only the blocks a command needs must be present
/// (accessors throw ConfigError naming the missing block otherwise).
struct RunConfig {
    SpinSystem system;
    std::vector<HostNucleus> nuclei;
    Level level = Level::ground;
    std::pair<int, int> pair{1, 3};     // 0-based internally; 1-based in file
    ModelConfig model;

    std::optional<S1MapConfig> s1_map;
    std::optional<EchoMapConfig> echo_map;
    std::optional<EseemConfig> eseem;
    std::optional<RabiConfig> rabi;
    std::optional<ZefozConfig> zefoz;

    std::string digest;                 // stable hash of the canonical file
    std::string source_path;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source_path = "<memory>");

Axis parse_axis(const std::string& name);
std::string axis_name(Axis axis);

}  // namespace zefoz
