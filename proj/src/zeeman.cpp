#include "zefoz/zeeman.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "zefoz/nelder_mead.hpp"

namespace zefoz {

namespace {

constexpr double kDegeneracyGapHz = 1e3;  // below this the closed form is off

/// Map each reference eigenvector to the best-overlapping column of `eig`.
/// Prevents label swaps near level crossings.
std::array<int, 4> track_levels(const Mat4c& reference, const EigenSystem& eig) {
    std::array<int, 4> map{};
    std::array<bool, 4> used{};
    for (int r = 0; r < 4; ++r) {
        double best = -1.0;
        int arg = -1;
        for (int c = 0; c < 4; ++c) {
            if (used[c]) continue;
            double ov = std::abs(inner(reference.column(r), eig.eigenvectors.column(c)));
            if (ov > best) { best = ov; arg = c; }
        }
        map[r] = arg;
        used[arg] = true;
    }
    return map;
}

Vec3 principal_axis(const Mat3& orientation, int m) {
    return {orientation(0, m), orientation(1, m), orientation(2, m)};
}

double min_gap(const Vec4& e) {
    double g = e[1] - e[0];
    g = std::min(g, e[2] - e[1]);
    return std::min(g, e[3] - e[2]);
}

void check_state_index(int state) {
    if (state < 0 || state > 3) throw std::invalid_argument("level index must be in [0, 3]");
}

void check_pair(std::pair<int, int> pair) {
    check_state_index(pair.first);
    check_state_index(pair.second);
    if (pair.first == pair.second) throw std::invalid_argument("transition pair must name two distinct levels");
}

// Base step for the Richardson-extrapolated central difference. The energy
// difference across the step must stay well above the eigenvalue roundoff
// (~1e-16 x ||H||), which favours a larger step; the extrapolation keeps the
// truncation error negligible at this size.
double fd_step(const FieldVector& field) {
    return std::max(1e-8, 1e-3 * field.magnitude());
}

}  // namespace

int partner_level(const SpinSystem& system, Level level, int state, int axis) {
    check_state_index(state);
    EigenSystem zero = diagonalize(build_hamiltonian(system, level, FieldVector{}));
    if (min_gap(zero.eigenvalues) < kDegeneracyGapHz)
        throw std::runtime_error("zero-field spectrum is degenerate; no unique partner level");

    Mat4c s = electron_spin_along(principal_axis(system.zeeman(level).orientation, axis));
    Vec4c vk = zero.eigenvectors.column(state);
    int arg = -1;
    double best = 0.0;
    for (int l = 0; l < 4; ++l) {
        if (l == state) continue;
        double a = std::abs(inner(zero.eigenvectors.column(l), s * vk));
        if (a > best) { best = a; arg = l; }
    }
    if (arg < 0 || best < 1e-6) throw std::runtime_error("no partner level found");
    return arg;
}

SpinExpectation effective_spin_expectation(const SpinSystem& system, Level level, int state,
                                           const FieldVector& field) {
    check_state_index(state);
    if (!field.finite()) throw std::invalid_argument("non-finite magnetic field");

    const InteractionTensor& g = system.zeeman(level);
    EigenSystem zero = diagonalize(build_hamiltonian(system, level, FieldVector{}));

    SpinExpectation out;
    double gap = min_gap(zero.eigenvalues);
    out.closed_form_valid = gap >= kDegeneracyGapHz;

    double gmax = std::max({std::abs(g.principal_values[0]), std::abs(g.principal_values[1]),
                            std::abs(g.principal_values[2])});
    out.perturbative_regime =
        system.bohr_magneton_hz_per_t * gmax * field.magnitude() < 0.1 * gap;

    // Field components along the shared principal axes.
    Vec3 b_principal = g.orientation.transposed() * field.components();

    if (out.closed_form_valid) {
        for (int m = 0; m < 3; ++m) {
            int partner = partner_level(system, level, state, m);
            double denom = zero.eigenvalues[state] - zero.eigenvalues[partner];
            out.closed_form[m] = 0.5 * system.bohr_magneton_hz_per_t * b_principal[m] *
                                 g.principal_values[m] / denom;
        }
    }

    EigenSystem at_field = diagonalize(build_hamiltonian(system, level, field));
    auto map = track_levels(zero.eigenvectors, at_field);
    Vec4c v = at_field.eigenvectors.column(map[state]);
    for (int m = 0; m < 3; ++m) {
        Mat4c s = electron_spin_along(principal_axis(g.orientation, m));
        out.exact[m] = inner(v, s * v).real();
    }
    return out;
}

LevelGradient level_gradient(const SpinSystem& system, Level level, int state,
                             const FieldVector& field) {
    check_state_index(state);
    if (!field.finite()) throw std::invalid_argument("non-finite magnetic field");

    const InteractionTensor& g = system.zeeman(level);
    Mat3 g_crystal = g.crystal_tensor();

    EigenSystem base = diagonalize(build_hamiltonian(system, level, field));
    EigenSystem zero = diagonalize(build_hamiltonian(system, level, FieldVector{}));
    auto map = track_levels(zero.eigenvectors, base);
    int col = map[state];
    Vec4c v = base.eigenvectors.column(col);

    LevelGradient out;
    out.level = state;

    // Hellmann-Feynman: dE/dB_i = mu_B sum_j g_ij <S_j> in the crystal frame.
    Vec3 s_crystal{};
    for (int j = 0; j < 3; ++j) s_crystal[j] = inner(v, electron_spin_operator(j) * v).real();
    for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) acc += g_crystal(i, j) * s_crystal[j];
        out.gradient_hz_per_t[i] = system.bohr_magneton_hz_per_t * acc;
    }

    // Exact expectation along the principal axes, for callers wanting the
    // effective dipole moment.
    for (int m = 0; m < 3; ++m) {
        Mat4c s = electron_spin_along(principal_axis(g.orientation, m));
        out.spin_expectation[m] = inner(v, s * v).real();
    }

    double h = fd_step(field);
    for (int i = 0; i < 3; ++i) {
        auto central = [&](double step) {
            Vec3 dv{};
            dv[i] = step;
            FieldVector plus = FieldVector::from_components(field.components() + dv);
            FieldVector minus = FieldVector::from_components(field.components() - dv);
            EigenSystem ep = diagonalize(build_hamiltonian(system, level, plus));
            EigenSystem em = diagonalize(build_hamiltonian(system, level, minus));
            int cp = track_levels(base.eigenvectors, ep)[col];
            int cm = track_levels(base.eigenvectors, em)[col];
            return (ep.eigenvalues[cp] - em.eigenvalues[cm]) / (2.0 * step);
        };
        // Richardson extrapolation of the central difference cancels the
        // O(h^2) truncation term.
        out.gradient_fd_hz_per_t[i] = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }

    double gmax = std::max({std::abs(g.principal_values[0]), std::abs(g.principal_values[1]),
                            std::abs(g.principal_values[2])});
    out.perturbative_regime =
        system.bohr_magneton_hz_per_t * gmax * field.magnitude() < 0.1 * min_gap(zero.eigenvalues);
    return out;
}

S1Result s1_transition_gradient(const SpinSystem& system, Level level,
                                std::pair<int, int> pair, const FieldVector& field) {
    check_pair(pair);
    if (pair.first > pair.second) std::swap(pair.first, pair.second);

    LevelGradient lower = level_gradient(system, level, pair.first, field);
    LevelGradient upper = level_gradient(system, level, pair.second, field);

    S1Result out;
    out.pair = pair;
    out.gradient_hz_per_t = upper.gradient_fd_hz_per_t - lower.gradient_fd_hz_per_t;
    out.norm_hz_per_t = norm(out.gradient_hz_per_t);
    return out;
}

GradientMap s1_map(const SpinSystem& system, Level level, std::pair<int, int> pair,
                   Axis axis1, Axis axis2,
                   const std::vector<double>& axis1_tesla,
                   const std::vector<double>& axis2_tesla,
                   double fixed_offset_tesla, int threads) {
    check_pair(pair);
    if (axis1 == axis2) throw std::invalid_argument("map axes must differ");
    if (axis1_tesla.size() < 2 || axis2_tesla.size() < 2)
        throw std::invalid_argument("map grid must be at least 2x2");

    GradientMap map;
    map.axis1 = axis1;
    map.axis2 = axis2;
    map.axis1_tesla = axis1_tesla;
    map.axis2_tesla = axis2_tesla;
    map.pair = pair;
    map.fixed_offset_tesla = fixed_offset_tesla;
    map.s1_hz_per_t.assign(axis1_tesla.size() * axis2_tesla.size(), 0.0);

    int third = 3 - static_cast<int>(axis1) - static_cast<int>(axis2);

    auto eval_row = [&](size_t i) {
        for (size_t j = 0; j < axis2_tesla.size(); ++j) {
            Vec3 b{};
            b[static_cast<int>(axis1)] = axis1_tesla[i];
            b[static_cast<int>(axis2)] = axis2_tesla[j];
            b[third] = fixed_offset_tesla;
            S1Result r = s1_transition_gradient(system, level, pair, FieldVector::from_components(b));
            map.s1_hz_per_t[i * axis2_tesla.size() + j] = r.norm_hz_per_t;
        }
    };

    size_t rows = axis1_tesla.size();
    if (threads <= 1) {
        for (size_t i = 0; i < rows; ++i) eval_row(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < rows; i = next.fetch_add(1)) eval_row(i);
            });
        for (auto& t : pool) t.join();
    }
    return map;
}

double s1_minimum_angle(const SpinSystem& system, Level level, std::pair<int, int> pair,
                        Axis axis1, Axis axis2, double magnitude_tesla, double offset_tesla) {
    check_pair(pair);
    int third = 3 - static_cast<int>(axis1) - static_cast<int>(axis2);

    auto norm_at = [&](double phi) {
        Vec3 b{};
        b[static_cast<int>(axis1)] = magnitude_tesla * std::cos(phi);
        b[static_cast<int>(axis2)] = magnitude_tesla * std::sin(phi);
        b[third] = offset_tesla;
        return s1_transition_gradient(system, level, pair, FieldVector::from_components(b)).norm_hz_per_t;
    };

    const int coarse = 720;
    double best_phi = 0.0, best = norm_at(0.0);
    for (int i = 1; i < coarse; ++i) {
        double phi = kPi * i / coarse;
        double v = norm_at(phi);
        if (v < best) { best = v; best_phi = phi; }
    }

    // Golden-section refinement around the coarse minimum.
    double a = best_phi - kPi / coarse;
    double b = best_phi + kPi / coarse;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = norm_at(x1), f2 = norm_at(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-7; ++it) {
        if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = norm_at(x1); }
        else { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = norm_at(x2); }
    }
    double phi = 0.5 * (a + b);
    phi = std::fmod(phi, kPi);
    if (phi < 0.0) phi += kPi;
    return phi;
}

ZefozResult zefoz_search(const SpinSystem& system, Level level, std::pair<int, int> pair,
                         const FieldVector& initial, double bound_tesla,
                         const ZefozOptions& opts) {
    check_pair(pair);
    if (!(bound_tesla > 0.0)) throw std::invalid_argument("bounds box must have positive extent");

    auto objective = [&](const std::vector<double>& x) {
        double penalty = 0.0;
        Vec3 b = {x[0], x[1], x[2]};
        for (int i = 0; i < 3; ++i) {
            double excess = std::abs(b[i]) - bound_tesla;
            if (excess > 0.0) {
                b[i] = std::copysign(bound_tesla, b[i]);
                penalty += excess;
            }
        }
        S1Result r = s1_transition_gradient(system, level, pair, FieldVector::from_components(b));
        // Penalty scale: steepest credible gradient growth per Tesla.
        return r.norm_hz_per_t + penalty * 1e16;
    };

    std::vector<double> x0 = {initial.d1, initial.d2, initial.b};
    std::vector<double> step(3, 0.05 * bound_tesla);
    SimplexOptions sopts;
    sopts.max_iterations = opts.max_iterations;
    sopts.x_tolerance = opts.simplex_tolerance_tesla;
    SimplexResult s = nelder_mead(objective, x0, step, sopts);

    ZefozResult out;
    out.field = {s.x[0], s.x[1], s.x[2]};
    out.s1_norm_hz_per_t =
        s1_transition_gradient(system, level, pair, out.field).norm_hz_per_t;
    out.iterations = s.iterations;
    out.converged = s.converged;
    return out;
}

}  // namespace zefoz
