#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "reeblab/geometry.hpp"

namespace reeblab {

/// Sparse polynomial in the ambient coordinates (x0,x1,x2,x3) of R^4.
/// All differential-geometric data downstream (Reeb fields, pulled-back
/// one-forms, curvature of the section) is evaluated through exact partial
/// derivatives of these polynomials; no finite differencing enters.
class Poly {
public:
    struct Term {
        std::array<uint8_t, 4> e;  // exponents
        double c;                  // coefficient
    };

    Poly() = default;
    explicit Poly(double constant);
    static Poly monomial(std::array<uint8_t, 4> e, double c);
    static Poly coordinate(int i);

    double eval(const Vec4& x) const;
    Poly partial(int i) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(double s) const;
    Poly& operator+=(const Poly& o);

    /// Substitution x -> M x (linear change of coordinates).
    Poly compose_linear(const Mat4& M) const;

    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

private:
    void merge();
    std::vector<Term> terms_;
};

/// Polynomial one-form  omega = sum_k P_k dx_k  on R^4, with the coefficient
/// polynomials of d(omega) cached on construction.
class OneForm {
public:
    OneForm() = default;
    explicit OneForm(std::array<Poly, 4> comps);

    /// omega_q(v)
    double eval(const Vec4& q, const Vec4& v) const;
    /// d(omega)_q(u, v); antisymmetric in (u, v) by construction.
    double d_eval(const Vec4& q, const Vec4& u, const Vec4& v) const;

    OneForm operator+(const OneForm& o) const;
    OneForm operator-(const OneForm& o) const;
    OneForm operator*(double s) const;

    /// Multiply by a scalar polynomial (for conformal factors (1+eps f)).
    OneForm scaled_by(const Poly& f) const;

    /// Pullback under the linear map x -> M x.
    OneForm pullback_linear(const Mat4& M) const;

    const Poly& component(int k) const { return comp_[k]; }

    /// Exterior derivative coefficient d_{jk} = d_j P_k - d_k P_j (j<k).
    const Poly& d_coef(int j, int k) const { return dcoef_[j][k]; }

private:
    void build_d();
    std::array<Poly, 4> comp_;
    std::array<std::array<Poly, 4>, 4> dcoef_;  // only j<k populated
};

/// d(h) for a polynomial function h.
OneForm exterior_derivative(const Poly& h);

/// The reference Zoll form alpha_* = (1/2pi) (x0 dx1 - x1 dx0 + x2 dx3 - x3 dx2).
OneForm standard_zoll_oneform();

} // namespace reeblab
