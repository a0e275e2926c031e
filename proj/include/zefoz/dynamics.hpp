#pragma once

#include <utility>
#include <vector>

#include "zefoz/eseem.hpp"
#include "zefoz/spin_core.hpp"

namespace zefoz {

/// Ensemble-averaged Rabi oscillation of a detuning-broadened two-level
/// transition; values are excited-state populations in [0, 1].
struct RabiTrace {
    std::vector<double> time_s;
    std::vector<double> population;
    double omega_rad_per_s = 0.0;
    double sigma_hz = 0.0;         // Gaussian detuning standard deviation
};

/// Everything needed to synthesize a Hahn-echo amplitude: spin model plus
/// nuclei for the modulation and the empirical coherence-time law.
struct EchoModel {
    SpinSystem system;
    Level level = Level::ground;
    std::pair<int, int> pair{1, 3};
    std::vector<HostNucleus> nuclei;
    double e0 = 1.0;
    double t2_zero_s = 10.3e-3;
    double kappa_hz_per_t = 1.48e6;
    double b0_tesla = 0.0;
    double mims_m = 1.0;
};

struct EchoMap {
    std::vector<double> field_tesla;   // swept-axis values
    std::vector<double> tau_s;
    std::vector<double> amplitude;     // row-major, field rows x tau cols

    double at(size_t i, size_t j) const { return amplitude[i * tau_s.size() + j]; }
};

/// Empirical coherence-time law T2(B) = 1/(1/T2(0) + pi kappa |B - B0|).
double t2_of_field(double t2_zero_s, double kappa_hz_per_t, double b0_tesla, double b_tesla);

/// P(t) = integral dD G_sigma(D) (O^2/(O^2+D^2)) sin^2(sqrt(O^2+D^2) t/2),
/// evaluated by Gauss-Hermite quadrature (>= 64 nodes).
RabiTrace rabi_trace(double omega_rad_per_s, double sigma_hz, const std::vector<double>& time_s,
                     int quadrature_nodes = 512);

/// E(tau) = E0 exp(-(2 tau / T2(B))^m) V(tau; B), with V the two-pulse
/// modulation envelope as a function of the pulse separation tau.
double echo_amplitude(const EchoModel& model, double tau_s, const FieldVector& field);

/// Decay map over a swept field axis with a fixed transverse offset. The
/// coherence-time law sees the model field magnitude sqrt(offset^2 + B^2).
EchoMap echo_map(const EchoModel& model, Axis swept_axis, const std::vector<double>& sweep_tesla,
                 Axis offset_axis, double offset_tesla, const std::vector<double>& tau_s);

/// Gauss-Hermite nodes/weights for integrating exp(-x^2) f(x) over R.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);

}  // namespace zefoz
