#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "zefoz/spin_core.hpp"
#include "zefoz/units.hpp"

using namespace zefoz;

namespace {

SpinSystem default_system() {
    SpinSystem s;
    const double a = 55.9 * kPi / 180.0;
    s.a_ground = InteractionTensor::from_euler_zyz({2369.55e6, -1313.55e6, 3679.55e6}, a, 0, 0);
    s.g_ground = InteractionTensor::from_euler_zyz({0.31, 1.60, 6.53}, a, 0, 0);
    return s;
}

SpinSystem diagonal_system(const Vec3& a_values, const Vec3& g_values) {
    SpinSystem s;
    s.a_ground = InteractionTensor::from_euler_zyz(a_values, 0, 0, 0);
    s.g_ground = InteractionTensor::from_euler_zyz(g_values, 0, 0, 0);
    return s;
}

}  // namespace

TEST_CASE("interaction tensor validation") {
    InteractionTensor t = InteractionTensor::from_euler_zyz({1e6, 2e6, 3e6}, 0.3, 0.7, -0.2);
    CHECK_NOTHROW(t.validate());
    CHECK(t.orientation.determinant() == doctest::Approx(1.0).epsilon(1e-12));

    // Crystal tensor stays symmetric for generic rotations.
    const Mat3 c = t.crystal_tensor();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(c(i, j) - c(j, i)) <= 1e-12 * 3e6);
        }
    }

    InteractionTensor bad = t;
    bad.orientation(0, 0) = 2.0;  // not orthogonal
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("isotropic hyperfine gives singlet-triplet splitting") {
    const double a = 1.7e9;
    SpinSystem s = diagonal_system({a, a, a}, {1.0, 1.0, 1.0});
    const EigenSystem eigs = diagonalize(build_hamiltonian(s, Level::ground, {}));
    CHECK(eigs.eigenvalues[0] == doctest::Approx(-0.75 * a).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) {
        CHECK(eigs.eigenvalues[i] == doctest::Approx(0.25 * a).epsilon(1e-12));
    }
}

TEST_CASE("anisotropic zero-field closed form matches diagonalization") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-5e9, 5e9);
    for (int trial = 0; trial < 1000; ++trial) {
        InteractionTensor a;
        a.principal_values = {u(rng), u(rng), u(rng)};
        SpinSystem s = diagonal_system(a.principal_values, {1.0, 1.0, 1.0});
        const Vec4 closed = zero_field_levels(a);
        const EigenSystem eigs = diagonalize(build_hamiltonian(s, Level::ground, {}));
        const double scale = std::max(std::abs(closed[0]), std::abs(closed[3]));
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(closed[i] - eigs.eigenvalues[i]) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("pure electronic Zeeman doublet") {
    const double g = 6.0, bb = 1e-3;
    SpinSystem s = diagonal_system({0, 0, 0}, {g, g, g});
    const EigenSystem eigs = diagonalize(build_hamiltonian(s, Level::ground, {0, 0, bb}));
    const double split = 0.5 * kBohrMagnetonHzPerT * g * bb;
    CHECK(eigs.eigenvalues[0] == doctest::Approx(-split).epsilon(1e-10));
    CHECK(eigs.eigenvalues[1] == doctest::Approx(-split).epsilon(1e-10));
    CHECK(eigs.eigenvalues[2] == doctest::Approx(split).epsilon(1e-10));
    CHECK(eigs.eigenvalues[3] == doctest::Approx(split).epsilon(1e-10));
}

TEST_CASE("diagonal matrix diagonalizes to identity eigenvectors") {
    Mat4c h;
    for (int i = 0; i < 4; ++i) h(i, i) = static_cast<double>(i + 1);
    const EigenSystem eigs = diagonalize(h);
    for (int i = 0; i < 4; ++i) {
        CHECK(eigs.eigenvalues[i] == doctest::Approx(i + 1.0).epsilon(1e-14));
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(eigs.eigenvectors(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-12);
        }
    }
}

TEST_CASE("eigenvalues match characteristic-polynomial oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const Mat4c h = oracles::random_hermitian(rng, 1e9);
        const EigenSystem eigs = diagonalize(h);
        const auto ref = oracles::hermitian_eigenvalues(h);
        const double scale = h.frobenius_norm();
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(eigs.eigenvalues[i] - ref[i]) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("eigensystem residuals, unitarity, and trace identity") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat4c h = oracles::random_hermitian(rng, 1e9);
        const EigenSystem eigs = diagonalize(h);
        const double scale = h.frobenius_norm();

        double trace_sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            trace_sum += eigs.eigenvalues[k];
            const Vec4c v = eigs.eigenvectors.column(k);
            const Vec4c hv = h * v;
            double resid = 0.0;
            for (int i = 0; i < 4; ++i) resid += std::norm(hv[i] - eigs.eigenvalues[k] * v[i]);
            CHECK(std::sqrt(resid) <= 1e-9 * scale);
        }
        CHECK(std::abs(trace_sum - h.trace().real()) <= 1e-9 * scale);

        const Mat4c gram = eigs.eigenvectors.adjoint() * eigs.eigenvectors;
        Mat4c delta = gram + complexd(-1.0, 0.0) * Mat4c::identity();
        CHECK(delta.frobenius_norm() <= 1e-10);
    }
}

TEST_CASE("phase convention puts the dominant component on the positive real axis") {
    std::mt19937_64 rng(9);
    const Mat4c h = oracles::random_hermitian(rng, 1.0);
    const EigenSystem eigs = diagonalize(h);
    for (int k = 0; k < 4; ++k) {
        const Vec4c v = eigs.eigenvectors.column(k);
        int arg = 0;
        for (int i = 1; i < 4; ++i)
            if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
        CHECK(v[arg].real() > 0.0);
        CHECK(std::abs(v[arg].imag()) <= 1e-12);
    }
}

TEST_CASE("non-Hermitian input is rejected") {
    Mat4c h;
    h(0, 1) = complexd(1.0, 0.0);
    h(1, 0) = complexd(5.0, 0.0);  // badly asymmetric
    CHECK_THROWS_AS(diagonalize(h), std::invalid_argument);
}

TEST_CASE("non-finite field is rejected") {
    SpinSystem s = default_system();
    FieldVector f{std::numeric_limits<double>::quiet_NaN(), 0, 0};
    CHECK_THROWS_AS(build_hamiltonian(s, Level::ground, f), std::invalid_argument);
}

TEST_CASE("default tensors reproduce the measured gap ladder") {
    SpinSystem s = default_system();
    const Mat4c h = build_hamiltonian(s, Level::ground, {});
    CHECK(std::abs(h.trace()) <= 1e-12 * h.frobenius_norm());

    const EigenSystem eigs = diagonalize(h);
    const TransitionTable table = transition_table(eigs, s, Level::ground, {});
    auto freq = [&](int lo, int up) {
        for (const Transition& t : table) {
            if (t.lower == lo && t.upper == up) return t.frequency_hz;
        }
        FAIL("missing pair");
        return 0.0;
    };
    CHECK(freq(0, 1) == doctest::Approx(528e6).epsilon(1e-3));
    CHECK(freq(1, 2) == doctest::Approx(655e6).epsilon(1e-3));
    CHECK(freq(2, 3) == doctest::Approx(1841.55e6).epsilon(1e-3));
    CHECK(freq(1, 3) == doctest::Approx(2496.55e6).epsilon(1e-3));
    CHECK(freq(0, 3) == doctest::Approx(3024.55e6).epsilon(1e-3));

    // Telescoping consistency must be exact to rounding.
    CHECK(std::abs(freq(0, 2) - (freq(0, 1) + freq(1, 2))) <= 1e-9 * freq(0, 2));
    CHECK(std::abs(freq(0, 3) - (freq(0, 1) + freq(1, 2) + freq(2, 3))) <= 1e-9 * freq(0, 3));

    // The clock transition must be magnetically drivable at zero field.
    const Vec3 m = table[4].moment_hz_per_t;  // pair (2,4), 1-based
    CHECK((table[4].lower == 1 && table[4].upper == 3));
    CHECK(norm(m) > 1e6);
}

TEST_CASE("isotropic config collapses the transition table to one frequency") {
    const double a = 2.0e9;
    SpinSystem s = diagonal_system({a, a, a}, {1.0, 1.0, 1.0});
    const EigenSystem eigs = diagonalize(build_hamiltonian(s, Level::ground, {}));
    const TransitionTable table = transition_table(eigs, s, Level::ground, {});
    int nonzero = 0;
    for (const Transition& t : table) {
        CHECK(t.frequency_hz >= 0.0);
        if (t.frequency_hz > 1.0) {
            ++nonzero;
            CHECK(t.frequency_hz == doctest::Approx(a).epsilon(1e-10));
        }
    }
    CHECK(nonzero == 3);  // singlet to each of the three degenerate states
}

TEST_CASE("zero-field spectrum is frame covariant") {
    const Vec3 pv{2369.55e6, -1313.55e6, 3679.55e6};
    const EigenSystem base = diagonalize(
        build_hamiltonian(diagonal_system(pv, {1, 1, 1}), Level::ground, {}));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 50; ++trial) {
        SpinSystem s;
        const double al = u(rng), be = 0.5 * u(rng), ga = u(rng);
        s.a_ground = InteractionTensor::from_euler_zyz(pv, al, be, ga);
        s.g_ground = InteractionTensor::from_euler_zyz({1, 1, 1}, al, be, ga);
        const EigenSystem rotated = diagonalize(build_hamiltonian(s, Level::ground, {}));
        for (int i = 0; i < 4; ++i) {
            CHECK(rotated.eigenvalues[i] ==
                  doctest::Approx(base.eigenvalues[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("generic anisotropic tensor fully lifts the zero-field degeneracy") {
    SpinSystem s = default_system();
    const EigenSystem eigs = diagonalize(build_hamiltonian(s, Level::ground, {}));
    for (int i = 1; i < 4; ++i) {
        CHECK(eigs.eigenvalues[i] - eigs.eigenvalues[i - 1] > 1e6);
    }
}

TEST_CASE("zero_field_levels closed-form examples") {
    InteractionTensor iso;
    iso.principal_values = {1e9, 1e9, 1e9};
    const Vec4 lv = zero_field_levels(iso);
    CHECK(lv[0] == doctest::Approx(-0.75e9).epsilon(1e-12));
    CHECK(lv[1] == doctest::Approx(0.25e9).epsilon(1e-12));
    CHECK(lv[2] == doctest::Approx(0.25e9).epsilon(1e-12));
    CHECK(lv[3] == doctest::Approx(0.25e9).epsilon(1e-12));

    InteractionTensor axial;
    axial.principal_values = {0.0, 0.0, 4e9};
    const Vec4 ax = zero_field_levels(axial);
    CHECK(ax[0] == doctest::Approx(-1e9).epsilon(1e-12));
    CHECK(ax[1] == doctest::Approx(-1e9).epsilon(1e-12));
    CHECK(ax[2] == doctest::Approx(1e9).epsilon(1e-12));
    CHECK(ax[3] == doctest::Approx(1e9).epsilon(1e-12));
}

TEST_CASE("principal values recovered from the gap ladder reproduce it") {
    const Vec3 pv = principal_values_from_ladder(528e6, 655e6, 1841.55e6);
    InteractionTensor t;
    t.principal_values = pv;
    const Vec4 lv = zero_field_levels(t);
    CHECK(lv[1] - lv[0] == doctest::Approx(528e6).epsilon(1e-9));
    CHECK(lv[2] - lv[1] == doctest::Approx(655e6).epsilon(1e-9));
    CHECK(lv[3] - lv[2] == doctest::Approx(1841.55e6).epsilon(1e-9));
    // Canonical sign choice: the dominant component comes out positive.
    int arg = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(pv[i]) > std::abs(pv[arg])) arg = i;
    CHECK(pv[arg] > 0.0);
}

TEST_CASE("spin operators obey su(2) commutation") {
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        const Mat4c sa = electron_spin_operator(a), sb = electron_spin_operator(b);
        const Mat4c comm = sa * sb + complexd(-1.0, 0.0) * (sb * sa);
        const Mat4c expect = complexd(0.0, 1.0) * electron_spin_operator(c);
        Mat4c delta = comm + complexd(-1.0, 0.0) * expect;
        CHECK(delta.frobenius_norm() <= 1e-14);

        // Electron and nuclear operators act on different factors.
        const Mat4c ia = nuclear_spin_operator(b);
        Mat4c cross = sa * ia + complexd(-1.0, 0.0) * (ia * sa);
        CHECK(cross.frobenius_norm() <= 1e-14);
    }
}
