#include "zefoz/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zefoz {

namespace {

constexpr double kOrthoTol = 1e-12;

/// One cyclic Jacobi sweep target: convergence when the off-diagonal
/// Frobenius norm drops below this fraction of the matrix norm.
constexpr double kJacobiTol = 1e-14;
constexpr int kMaxSweeps = 60;

double off_diagonal_norm(const Mat4c& a) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

void fix_phase(Mat4c& v) {
    for (int j = 0; j < 4; ++j) {
        int imax = 0;
        double best = 0.0;
        for (int i = 0; i < 4; ++i) {
            double a = std::abs(v(i, j));
            if (a > best) { best = a; imax = i; }
        }
        complexd pivot = v(imax, j);
        if (std::abs(pivot) == 0.0) continue;
        complexd phase = std::conj(pivot) / std::abs(pivot);
        for (int i = 0; i < 4; ++i) v(i, j) *= phase;
    }
}

}  // namespace

InteractionTensor InteractionTensor::from_euler_zyz(const Vec3& principal_values,
                                                    double alpha_rad, double beta_rad,
                                                    double gamma_rad) {
    InteractionTensor t;
    t.principal_values = principal_values;
    t.orientation = euler_zyz(alpha_rad, beta_rad, gamma_rad);
    return t;
}

Mat3 InteractionTensor::crystal_tensor() const {
    Mat3 d;
    d(0, 0) = principal_values[0];
    d(1, 1) = principal_values[1];
    d(2, 2) = principal_values[2];
    return orientation * d * orientation.transposed();
}

void InteractionTensor::validate() const {
    for (double v : principal_values)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite tensor principal value");

    Mat3 rtr = orientation.transposed() * orientation;
    Mat3 id = Mat3::identity();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(rtr(i, j) - id(i, j)) > kOrthoTol)
                throw std::invalid_argument("tensor orientation is not orthogonal");
    if (std::abs(orientation.determinant() - 1.0) > kOrthoTol)
        throw std::invalid_argument("tensor orientation must be a proper rotation (det +1)");

    Mat3 t = crystal_tensor();
    double scale = 0.0;
    for (int i = 0; i < 9; ++i) scale = std::max(scale, std::abs(t.m[i]));
    if (scale == 0.0) return;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(t(i, j) - t(j, i)) > kOrthoTol * scale)
                throw std::invalid_argument("reconstructed crystal tensor is not symmetric");
}

bool FieldVector::finite() const {
    return std::isfinite(d1) && std::isfinite(d2) && std::isfinite(b);
}

const InteractionTensor& SpinSystem::hyperfine(Level level) const {
    if (level == Level::ground) return a_ground;
    if (!a_excited) throw std::invalid_argument("excited-state hyperfine tensor is not configured");
    return *a_excited;
}

const InteractionTensor& SpinSystem::zeeman(Level level) const {
    if (level == Level::ground) return g_ground;
    if (!g_excited) throw std::invalid_argument("excited-state Zeeman tensor is not configured");
    return *g_excited;
}

void SpinSystem::validate() const {
    a_ground.validate();
    g_ground.validate();
    if (a_excited) a_excited->validate();
    if (g_excited) g_excited->validate();
    if (!(gamma_host_hz_per_t > 0.0))
        throw std::invalid_argument("host nuclear gyromagnetic ratio must be positive");
    if (!std::isfinite(bohr_magneton_hz_per_t) || bohr_magneton_hz_per_t <= 0.0)
        throw std::invalid_argument("invalid Bohr magneton value");
}

Mat4c electron_spin_operator(int axis) {
    // sigma/2 acting on the electron slot of |m_S, m_I>.
    Mat4c s;
    switch (axis) {
        case 0:
            s(0, 2) = s(2, 0) = s(1, 3) = s(3, 1) = 0.5;
            break;
        case 1:
            s(0, 2) = s(1, 3) = complexd(0, -0.5);
            s(2, 0) = s(3, 1) = complexd(0, 0.5);
            break;
        case 2:
            s(0, 0) = s(1, 1) = 0.5;
            s(2, 2) = s(3, 3) = -0.5;
            break;
        default:
            throw std::invalid_argument("axis must be 0, 1 or 2");
    }
    return s;
}

Mat4c nuclear_spin_operator(int axis) {
    Mat4c s;
    switch (axis) {
        case 0:
            s(0, 1) = s(1, 0) = s(2, 3) = s(3, 2) = 0.5;
            break;
        case 1:
            s(0, 1) = s(2, 3) = complexd(0, -0.5);
            s(1, 0) = s(3, 2) = complexd(0, 0.5);
            break;
        case 2:
            s(0, 0) = s(2, 2) = 0.5;
            s(1, 1) = s(3, 3) = -0.5;
            break;
        default:
            throw std::invalid_argument("axis must be 0, 1 or 2");
    }
    return s;
}

Mat4c electron_spin_along(const Vec3& direction) {
    Vec3 n = normalized(direction);
    Mat4c s;
    for (int a = 0; a < 3; ++a) s = s + complexd(n[a]) * electron_spin_operator(a);
    return s;
}

Mat4c build_hamiltonian(const SpinSystem& system, Level level, const FieldVector& field) {
    system.validate();
    if (!field.finite()) throw std::invalid_argument("non-finite magnetic field");

    Mat3 a = system.hyperfine(level).crystal_tensor();
    Mat3 g = system.zeeman(level).crystal_tensor();
    Vec3 b = field.components();

    Mat4c h;
    for (int i = 0; i < 3; ++i) {
        Mat4c si = electron_spin_operator(i);
        for (int j = 0; j < 3; ++j) {
            if (a(i, j) != 0.0) h = h + complexd(a(i, j)) * (si * nuclear_spin_operator(j));
        }
    }
    for (int j = 0; j < 3; ++j) {
        double c = 0.0;
        for (int i = 0; i < 3; ++i) c += b[i] * g(i, j);
        if (c != 0.0) h = h + complexd(system.bohr_magneton_hz_per_t * c) * electron_spin_operator(j);
    }
    return h;
}

EigenSystem diagonalize(const Mat4c& h) {
    double scale = h.frobenius_norm();
    double herm_err = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            herm_err = std::max(herm_err, std::abs(h(i, j) - std::conj(h(j, i))));
    if (scale > 0.0 && herm_err > 1e-10 * scale)
        throw std::invalid_argument("matrix is not Hermitian within tolerance");

    // Symmetrize to kill representation-level noise before iterating.
    Mat4c a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));

    Mat4c v = Mat4c::identity();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= kJacobiTol * std::max(scale, 1e-300)) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                complexd apq = a(p, q);
                double r = std::abs(apq);
                if (r <= 1e-2 * kJacobiTol * std::max(scale, 1e-300)) continue;

                complexd phase = apq / r;
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double theta = (aqq - app) / (2.0 * r);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                // Plane rotation in the (p,q) plane with the phase of a_pq.
                for (int i = 0; i < 4; ++i) {
                    complexd aip = a(i, p);
                    complexd aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(phase) * aiq;
                    a(i, q) = s * phase * aip + c * aiq;
                }
                for (int j = 0; j < 4; ++j) {
                    complexd apj = a(p, j);
                    complexd aqj = a(q, j);
                    a(p, j) = c * apj - s * phase * aqj;
                    a(q, j) = s * std::conj(phase) * apj + c * aqj;
                }
                for (int i = 0; i < 4; ++i) {
                    complexd vip = v(i, p);
                    complexd viq = v(i, q);
                    v(i, p) = c * vip - s * std::conj(phase) * viq;
                    v(i, q) = s * phase * vip + c * viq;
                }
            }
        }
    }

    std::array<int, 4> order = {0, 1, 2, 3};
    Vec4 diag = {a(0, 0).real(), a(1, 1).real(), a(2, 2).real(), a(3, 3).real()};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] < diag[j]; });

    EigenSystem out;
    for (int k = 0; k < 4; ++k) {
        out.eigenvalues[k] = diag[order[k]];
        for (int i = 0; i < 4; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    fix_phase(out.eigenvectors);
    return out;
}

TransitionTable transition_table(const EigenSystem& eigs, const SpinSystem& system,
                                 Level level, const FieldVector& field) {
    (void)field;
    Mat3 g = system.zeeman(level).crystal_tensor();

    std::array<Mat4c, 3> mu;
    for (int m = 0; m < 3; ++m) {
        Mat4c op;
        for (int b = 0; b < 3; ++b)
            if (g(m, b) != 0.0)
                op = op + complexd(system.bohr_magneton_hz_per_t * g(m, b)) * electron_spin_operator(b);
        mu[m] = op;
    }

    TransitionTable table;
    int n = 0;
    for (int k = 0; k < 4; ++k) {
        for (int l = k + 1; l < 4; ++l) {
            Transition t;
            t.lower = k;
            t.upper = l;
            t.frequency_hz = eigs.eigenvalues[l] - eigs.eigenvalues[k];
            Vec4c vk = eigs.eigenvectors.column(k);
            Vec4c vl = eigs.eigenvectors.column(l);
            for (int m = 0; m < 3; ++m) t.moment_hz_per_t[m] = std::abs(inner(vl, mu[m] * vk));
            table[n++] = t;
        }
    }
    return table;
}

Vec4 zero_field_levels(const InteractionTensor& a) {
    double ax = a.principal_values[0];
    double ay = a.principal_values[1];
    double az = a.principal_values[2];
    Vec4 e = {(az + ax - ay) / 4.0, (az - ax + ay) / 4.0,
              (-az + ax + ay) / 4.0, -(ax + ay + az) / 4.0};
    std::sort(e.begin(), e.end());
    return e;
}

Vec3 principal_values_from_ladder(double gap21, double gap32, double gap43) {
    // Sorted targets; traceless spectrum fixes the offset.
    double e1 = -(3.0 * gap21 + 2.0 * gap32 + gap43) / 4.0;
    Vec4 target = {e1, e1 + gap21, e1 + gap21 + gap32, e1 + gap21 + gap32 + gap43};

    double scale = std::max({std::abs(target[0]), std::abs(target[3]), 1.0});

    // Try every assignment of sorted levels to the closed-form branches
    // (lam1..lam4) and keep the solutions that reproduce the ladder. The
    // spectrum is invariant under flipping the sign of any two principal
    // values (a 180-degree rotation), so several algebraic solutions exist;
    // canonicalize by requiring the largest-magnitude component positive
    // and, among those, the lexicographically largest triple.
    std::vector<Vec3> solutions;
    std::array<int, 4> perm = {0, 1, 2, 3};
    std::sort(perm.begin(), perm.end());
    do {
        double l1 = target[perm[0]];
        double l2 = target[perm[1]];
        double l3 = target[perm[2]];
        // lam1 = (Az+Ax-Ay)/4, lam2 = (Az-Ax+Ay)/4, lam3 = (-Az+Ax+Ay)/4
        double az = 2.0 * (l1 + l2);
        double ax = l1 - l2 + 2.0 * l3 + az / 2.0;
        double ay = 2.0 * l3 + az / 2.0 - (l1 - l2);
        InteractionTensor t;
        t.principal_values = {ax, ay, az};
        Vec4 got = zero_field_levels(t);
        double err = 0.0;
        for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(got[i] - target[i]));
        if (err <= 1e-9 * scale) solutions.push_back({ax, ay, az});
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (solutions.empty()) {
        throw std::runtime_error("no principal-value assignment reproduces the requested ladder");
    }
    Vec3 best = solutions.front();
    auto dominant_positive = [](const Vec3& v) {
        int arg = 0;
        for (int i = 1; i < 3; ++i) {
            if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
        }
        return v[arg] > 0.0;
    };
    for (const Vec3& v : solutions) {
        const bool v_pos = dominant_positive(v);
        const bool best_pos = dominant_positive(best);
        if (v_pos != best_pos) {
            if (v_pos) best = v;
            continue;
        }
        if (std::lexicographical_compare(best.begin(), best.end(), v.begin(), v.end())) {
            best = v;
        }
    }
    return best;
}

}  // namespace zefoz
