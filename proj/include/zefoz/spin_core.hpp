#pragma once

#include <array>
#include <optional>
#include <utility>

#include "zefoz/linalg.hpp"
#include "zefoz/units.hpp"

namespace zefoz {

enum class Level { ground, excited };
enum class Axis { d1 = 0, d2 = 1, b = 2 };

/// Symmetric rank-2 interaction tensor (hyperfine A in Hz, Zeeman g
/// dimensionless) given by principal values and the rotation taking the
/// principal frame into the crystal frame (D1, D2, b).
struct InteractionTensor {
    Vec3 principal_values{};
    Mat3 orientation = Mat3::identity();

    static InteractionTensor from_euler_zyz(const Vec3& principal_values,
                                            double alpha_rad, double beta_rad, double gamma_rad);

    /// R * diag(principal_values) * R^T.
    Mat3 crystal_tensor() const;

    /// Checks orientation orthogonality (det +1) and that the reconstructed
    /// crystal-frame tensor is symmetric. Throws std::invalid_argument.
    void validate() const;
};

/// Magnetic field in the crystal frame (D1, D2, b), Tesla.
struct FieldVector {
    double d1 = 0.0;
    double d2 = 0.0;
    double b = 0.0;

    Vec3 components() const { return {d1, d2, b}; }
    double magnitude() const { return norm(components()); }
    bool finite() const;

    static FieldVector from_components(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

/// The configured physical model: hyperfine and Zeeman tensors for the two
/// electronic levels plus the host nuclear gyromagnetic constant.
/// Excited-state tensors are optional; they are only needed when the excited
/// electronic level is requested.
struct SpinSystem {
    InteractionTensor a_ground;
    InteractionTensor g_ground;
    std::optional<InteractionTensor> a_excited;
    std::optional<InteractionTensor> g_excited;
    double gamma_host_hz_per_t = 2.095e6;
    double bohr_magneton_hz_per_t = kBohrMagnetonHzPerT;

    const InteractionTensor& hyperfine(Level level) const;
    const InteractionTensor& zeeman(Level level) const;
    void validate() const;
};

/// Sorted eigenvalues (Hz, ascending) with orthonormal eigenvectors; column k
/// of `eigenvectors` belongs to eigenvalues[k]. Phase convention: the
/// largest-magnitude component of each eigenvector is real and positive.
struct EigenSystem {
    Vec4 eigenvalues{};
    Mat4c eigenvectors;
};

struct Transition {
    int lower = 0;   // 0-based level index
    int upper = 0;
    double frequency_hz = 0.0;
    Vec3 moment_hz_per_t{};  // |<u| mu_m |l>| for m = D1, D2, b
};

using TransitionTable = std::array<Transition, 6>;

/// Electron/nuclear spin-1/2 operators in the |m_S, m_I> product basis
/// ordered (uu, ud, du, dd). axis: 0=x, 1=y, 2=z of the requested frame.
Mat4c electron_spin_operator(int axis);
Mat4c nuclear_spin_operator(int axis);

/// Spin projection along an arbitrary unit direction, S . n.
Mat4c electron_spin_along(const Vec3& direction);

/// H = S.A.I + mu_B B.g.S in the product basis; entries in Hz. The nuclear
/// Zeeman term of the dopant nucleus is negligible at these fields and is
/// omitted.
Mat4c build_hamiltonian(const SpinSystem& system, Level level, const FieldVector& field);

/// Cyclic-Jacobi eigendecomposition of a 4x4 Hermitian matrix. Rejects
/// matrices that are non-Hermitian beyond 1e-10 relative.
EigenSystem diagonalize(const Mat4c& h);

/// All six pairwise transition frequencies f_kl = E_l - E_k (l > k) together
/// with the magnetic dipole matrix elements mu_m = mu_B sum_b g_mb S_b.
TransitionTable transition_table(const EigenSystem& eigs, const SpinSystem& system,
                                 Level level, const FieldVector& field);

/// Closed-form zero-field eigenvalues of S.A.I, sorted ascending:
/// {(Az+Ax-Ay)/4, (Az-Ax+Ay)/4, (-Az+Ax+Ay)/4, -(Ax+Ay+Az)/4}.
Vec4 zero_field_levels(const InteractionTensor& a);

/// Inverts the closed form: finds principal values whose sorted zero-field
/// spectrum has the given consecutive gaps (Hz). The sign/assignment
/// ambiguity is resolved by brute force over level assignments; the returned
/// solution reproduces the ladder exactly.
Vec3 principal_values_from_ladder(double gap21, double gap32, double gap43);

}  // namespace zefoz
