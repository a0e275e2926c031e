#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace zefoz {

using complexd = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Vec4c = std::array<complexd, 4>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return (1.0 / n) * a;
}

/// Row-major 3x3 real matrix.
struct Mat3 {
    std::array<double, 9> m{};

    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }

    static Mat3 identity() {
        Mat3 r;
        r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }

    friend Vec3 operator*(const Mat3& a, const Vec3& v) {
        Vec3 r{};
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) r[i] += a(i, k) * v[k];
        return r;
    }

    double determinant() const {
        const Mat3& a = *this;
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }
};

/// Rotation about axis 2 (the b axis when used in the crystal frame).
inline Mat3 rotation_z(double angle_rad) {
    Mat3 r = Mat3::identity();
    double c = std::cos(angle_rad), s = std::sin(angle_rad);
    r(0, 0) = c; r(0, 1) = -s;
    r(1, 0) = s; r(1, 1) = c;
    return r;
}

inline Mat3 rotation_y(double angle_rad) {
    Mat3 r = Mat3::identity();
    double c = std::cos(angle_rad), s = std::sin(angle_rad);
    r(0, 0) = c; r(0, 2) = s;
    r(2, 0) = -s; r(2, 2) = c;
    return r;
}

/// Z-Y-Z Euler rotation, angles in radians.
inline Mat3 euler_zyz(double alpha, double beta, double gamma) {
    return rotation_z(alpha) * rotation_y(beta) * rotation_z(gamma);
}

/// Row-major 4x4 complex matrix.
struct Mat4c {
    std::array<complexd, 16> m{};

    complexd& operator()(int i, int j) { return m[4 * i + j]; }
    complexd operator()(int i, int j) const { return m[4 * i + j]; }

    static Mat4c identity() {
        Mat4c r;
        for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
        return r;
    }

    Mat4c adjoint() const {
        Mat4c r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    friend Mat4c operator*(const Mat4c& a, const Mat4c& b) {
        Mat4c r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                complexd s = 0.0;
                for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }

    friend Mat4c operator+(const Mat4c& a, const Mat4c& b) {
        Mat4c r;
        for (int i = 0; i < 16; ++i) r.m[i] = a.m[i] + b.m[i];
        return r;
    }

    friend Mat4c operator*(complexd s, const Mat4c& a) {
        Mat4c r;
        for (int i = 0; i < 16; ++i) r.m[i] = s * a.m[i];
        return r;
    }

    Vec4c column(int j) const {
        return {(*this)(0, j), (*this)(1, j), (*this)(2, j), (*this)(3, j)};
    }

    friend Vec4c operator*(const Mat4c& a, const Vec4c& v) {
        Vec4c r{};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) r[i] += a(i, k) * v[k];
        return r;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : m) s += std::norm(z);
        return std::sqrt(s);
    }

    complexd trace() const { return m[0] + m[5] + m[10] + m[15]; }
};

inline complexd inner(const Vec4c& a, const Vec4c& b) {
    complexd s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm(const Vec4c& a) { return std::sqrt(std::abs(inner(a, a))); }

}  // namespace zefoz
