#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zefoz/spin_core.hpp"

namespace zefoz {

/// Effective spin expectation of one hyperfine level at a weak field.
/// Components refer to the principal axes of the (aligned) A/g tensors.
/// `closed_form` is the first-order value (1/2) mu_B B_m g_m / (E_l - E_l');
/// `exact` is <l(B)|S_m|l(B)> from numerical diagonalization.
struct SpinExpectation {
    Vec3 closed_form{};
    Vec3 exact{};
    bool closed_form_valid = true;      // false near zero-field degeneracies
    bool perturbative_regime = true;    // |mu_B g B| < 0.1 x smallest gap
};

struct LevelGradient {
    int level = 0;                      // 0-based, zero-field ascending order
    Vec3 gradient_hz_per_t{};           // Hellmann-Feynman, crystal frame
    Vec3 gradient_fd_hz_per_t{};        // central finite differences
    Vec3 spin_expectation{};            // exact <S_m>, principal frame
    bool perturbative_regime = true;
};

struct S1Result {
    std::pair<int, int> pair{0, 1};     // 0-based (k, l), l > k
    Vec3 gradient_hz_per_t{};           // crystal frame
    double norm_hz_per_t = 0.0;

    double directional(const Vec3& unit_direction) const {
        return dot(gradient_hz_per_t, unit_direction);
    }
};

/// S1 norms on a rectangular grid spanning a crystal-frame field plane.
struct GradientMap {
    Axis axis1 = Axis::d1;
    Axis axis2 = Axis::d2;
    std::vector<double> axis1_tesla;
    std::vector<double> axis2_tesla;
    std::vector<double> s1_hz_per_t;    // row-major, axis1 rows x axis2 cols
    std::pair<int, int> pair{0, 1};
    double fixed_offset_tesla = 0.0;    // along the remaining axis

    double at(size_t i, size_t j) const { return s1_hz_per_t[i * axis2_tesla.size() + j]; }
};

struct ZefozOptions {
    int max_iterations = 20000;
    double simplex_tolerance_tesla = 1e-12;
};

struct ZefozResult {
    FieldVector field;
    double s1_norm_hz_per_t = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Exact spin expectation plus the first-order closed form using the unique
/// partner level per axis. Throws if the zero-field spectrum is degenerate
/// and no exact path is possible; otherwise degeneracy only disables the
/// closed form (flagged on the result).
SpinExpectation effective_spin_expectation(const SpinSystem& system, Level level, int state,
                                           const FieldVector& field);

/// dE_k/dB via Hellmann-Feynman (mu_B g_m <k|S_m|k>) and via Richardson-
/// extrapolated central differences with base step max(1e-8 T, 1e-3 |B|).
/// Levels are tracked across field steps by maximal eigenvector overlap.
LevelGradient level_gradient(const SpinSystem& system, Level level, int state,
                             const FieldVector& field);

/// Transition-frequency gradient: difference of the connected level
/// gradients. The norm is the direction-averaged S1 figure of merit.
S1Result s1_transition_gradient(const SpinSystem& system, Level level,
                                std::pair<int, int> pair, const FieldVector& field);

/// S1 norm over a grid in the given plane; deterministic row-major layout.
/// `threads` > 1 evaluates grid rows concurrently (cells are independent).
GradientMap s1_map(const SpinSystem& system, Level level, std::pair<int, int> pair,
                   Axis axis1, Axis axis2,
                   const std::vector<double>& axis1_tesla,
                   const std::vector<double>& axis2_tesla,
                   double fixed_offset_tesla, int threads = 1);

/// In-plane angle (radians in [0, pi), measured from `axis1`) minimizing the
/// S1 norm at fixed field magnitude; golden-section refined.
double s1_minimum_angle(const SpinSystem& system, Level level, std::pair<int, int> pair,
                        Axis axis1, Axis axis2, double magnitude_tesla,
                        double offset_tesla = 0.0);

/// Derivative-free minimization of the S1 norm inside a bounds box
/// (component-wise, Tesla). Non-convergence is reported with the best
/// iterate rather than thrown.
ZefozResult zefoz_search(const SpinSystem& system, Level level, std::pair<int, int> pair,
                         const FieldVector& initial, double bound_tesla,
                         const ZefozOptions& opts = {});

/// Zero-field partner level of `state` along principal axis `axis`: the
/// unique l' != state with <l'|S_axis|state> != 0.
int partner_level(const SpinSystem& system, Level level, int state, int axis);

}  // namespace zefoz
