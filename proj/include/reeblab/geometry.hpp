#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace reeblab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

using Cplx = std::complex<double>;

/// Point / tangent vector in ambient R^4.  We identify R^4 with C^2 through
/// (x0,x1,x2,x3) <-> (z1,z2) = (x0+ix1, x2+ix3).
struct Vec4 {
    std::array<double, 4> v{0, 0, 0, 0};

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec4 operator+(const Vec4& o) const { return {{v[0] + o[0], v[1] + o[1], v[2] + o[2], v[3] + o[3]}}; }
    Vec4 operator-(const Vec4& o) const { return {{v[0] - o[0], v[1] - o[1], v[2] - o[2], v[3] - o[3]}}; }
    Vec4 operator*(double s) const { return {{v[0] * s, v[1] * s, v[2] * s, v[3] * s}}; }
    Vec4& operator+=(const Vec4& o) {
        for (int i = 0; i < 4; ++i) v[i] += o[i];
        return *this;
    }

    double dot(const Vec4& o) const { return v[0] * o[0] + v[1] * o[1] + v[2] * o[2] + v[3] * o[3]; }
    double norm() const { return std::sqrt(dot(*this)); }

    Cplx z1() const { return {v[0], v[1]}; }
    Cplx z2() const { return {v[2], v[3]}; }

    static Vec4 from_complex(Cplx a, Cplx b) { return {{a.real(), a.imag(), b.real(), b.imag()}}; }

    /// Project to the unit sphere.
    Vec4 normalized() const {
        double n = norm();
        return {{v[0] / n, v[1] / n, v[2] / n, v[3] / n}};
    }
};

inline Vec4 operator*(double s, const Vec4& a) { return a * s; }

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
    Cplx c() const { return {x, y}; }
    static Vec2 from_c(Cplx z) { return {z.real(), z.imag()}; }
};

/// Hermitian inner product <a,b> = a1 conj(b1) + a2 conj(b2) for points of C^2.
inline Cplx herm(const Vec4& a, const Vec4& b) {
    return a.z1() * std::conj(b.z1()) + a.z2() * std::conj(b.z2());
}

/// Multiplication by a unit complex scalar (the Hopf / deck action).
inline Vec4 phase_mul(const Vec4& q, double angle_turns) {
    Cplx w = std::polar(1.0, kTwoPi * angle_turns);
    return Vec4::from_complex(w * q.z1(), w * q.z2());
}

/// Real 4x4 matrix; used for ambient unitaries of C^2 acting on R^4.
struct Mat4 {
    std::array<std::array<double, 4>, 4> m{};

    static Mat4 identity() {
        Mat4 I;
        for (int i = 0; i < 4; ++i) I.m[i][i] = 1.0;
        return I;
    }

    Vec4 apply(const Vec4& x) const {
        Vec4 r;
        for (int i = 0; i < 4; ++i) {
            double s = 0;
            for (int j = 0; j < 4; ++j) s += m[i][j] * x[j];
            r[i] = s;
        }
        return r;
    }

    Mat4 transpose() const {
        Mat4 t;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t.m[i][j] = m[j][i];
        return t;
    }

    /// Real representation of the SU(2) matrix with first column (a,b):
    /// z -> (a z1 - conj(b) z2, b z1 + conj(a) z2).
    static Mat4 su2(Cplx a, Cplx b);
};

/// Orthonormal basis of the tangent space T_q S^3 (complement of q in R^4).
/// Deterministic in q.
std::array<Vec4, 3> tangent_basis(const Vec4& q);

} // namespace reeblab
