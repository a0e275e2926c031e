#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "zefoz/spin_core.hpp"
#include "zefoz/zeeman.hpp"

namespace zefoz {

/// A host-lattice nuclear spin, either by position relative to the dopant
/// ion (crystal frame, meters) or by an explicit (secular, pseudo-secular)
/// coupling pair in Hz.
struct HostNucleus {
    std::optional<Vec3> position_m;
    std::optional<std::pair<double, double>> coupling_hz;
    double gamma_hz_per_t = 2.095e6;

    void validate() const;
};

/// Two-pulse echo envelope V(2 tau) with the per-nucleus modulation depths.
struct EseemEnvelope {
    std::vector<double> tau_s;
    std::vector<double> values;          // in [0, 1]
    std::vector<double> depths;          // k_j, dimensionless
};

struct MomentScanPoint {
    FieldVector field;
    Vec3 moment_bohr{};                  // effective dipole difference, units of mu_B
    double moment_magnitude_bohr = 0.0;
    double modulation_depth = 0.0;       // 1 - prod_j (1 - 2 k_j), clamped
    double larmor_period_s = 0.0;
};

/// T = 1/(B gamma); infinite (no revival) at B = 0.
double larmor_period(double field_tesla, double gamma_hz_per_t);

/// Point-dipole secular/pseudo-secular couplings (Hz) felt by a positional
/// nucleus from an electronic moment given in units of mu_B. Both scale
/// linearly with the moment.
std::pair<double, double> dipolar_couplings(const Vec3& moment_bohr, const HostNucleus& nucleus,
                                            const Vec3& field_direction);

/// Product-rule two-pulse envelope over all nuclei:
/// V_j = 1 - (k_j/2)(1 - cos w_a tau)(1 - cos w_b tau), V = prod_j V_j,
/// clamped to [0, 1]. `moment_bohr` is the effective-dipole difference of
/// the two levels of the driven transition.
EseemEnvelope two_pulse_envelope(const std::vector<HostNucleus>& nuclei, const FieldVector& field,
                                 const Vec3& moment_bohr, const std::vector<double>& tau_s);

/// Effective moment magnitude and modulation depth along a path of fields;
/// combines the Zeeman-module expectations with the envelope depths.
std::vector<MomentScanPoint> moment_vs_field_scan(const SpinSystem& system, Level level,
                                                  std::pair<int, int> pair,
                                                  const std::vector<FieldVector>& path,
                                                  const std::vector<HostNucleus>& nuclei);

/// Effective dipole-moment difference (units of mu_B, crystal frame) between
/// the two levels of a transition at the given field.
Vec3 transition_moment_difference(const SpinSystem& system, Level level,
                                  std::pair<int, int> pair, const FieldVector& field);

}  // namespace zefoz
