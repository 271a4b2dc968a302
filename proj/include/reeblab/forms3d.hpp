#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reeblab/geometry.hpp"
#include "reeblab/polyform.hpp"

namespace reeblab {

/// Point on S^3 (the cover when lens_order p >= 2).  Lens points are
/// represented by a distinguished S^3 representative; equivalence is the
/// scalar action z ~ e^{2 pi i j / p} z on (z1, z2).
struct Point4 {
    Vec4 x;
    int lens_order = 1;

    Point4() = default;
    Point4(Vec4 v, int p = 1) : x(v.normalized()), lens_order(p) {}
    void reproject() { x = x.normalized(); }
};

enum class FormKind { zoll_reference, scaled_perturbation, one_form_shift };

/// Contact form on S^3 / L(p,1), held as a polynomial one-form on the cover.
/// For p >= 2 the stored form is the lift p * alpha_* (times perturbation),
/// with the deck action z -> e^{2 pi i / p} z understood.
struct ContactForm {
    OneForm omega;
    int lens_order = 1;
    FormKind kind = FormKind::zoll_reference;

    double eval(const Vec4& q, const Vec4& v) const { return omega.eval(q, v); }
    double d_eval(const Vec4& q, const Vec4& u, const Vec4& v) const {
        return omega.d_eval(q, u, v);
    }
    int t_sigma() const { return lens_order; }
};

/// Zoll form with prime class-h period 1: alpha_* for p=1, the lift p*alpha_*
/// for lens spaces.
ContactForm zoll_form(int p);

/// (1 + eps * f) * zoll_form(p) for a polynomial perturbation profile f.
ContactForm perturbed_form(int p, const Poly& f, double eps);

/// alpha + dh.
ContactForm with_exact_shift(const ContactForm& alpha, const Poly& h);

/// c * alpha.
ContactForm scaled_form(const ContactForm& alpha, double c);

/// Pullback (1/c) U^* alpha used by normalisation (Def. of rescaled forms).
ContactForm rescaled_pullback(const ContactForm& alpha, const Mat4& U, double c);

/// Reeb vector at q: kernel of the antisymmetric matrix dalpha(b_i,b_j) in an
/// orthonormal tangent basis, normalised by alpha(R) = 1.
/// Throws DegenerateContact when the contact condition fails numerically.
Vec4 reeb_at(const ContactForm& alpha, const Point4& q, double tol = 1e-8);

struct VolumeOptions {
    int n_u = 64;      // Gauss-Legendre nodes in u = |z2|^2
    int n_angle = 64;  // midpoint nodes in each Hopf angle
};

/// Contact volume by quadrature in Hopf torus coordinates; the orientation is
/// fixed so the Zoll density is +1, and lens results are divided by p.
/// Throws NonOrientedDensity if the integrand changes sign.
double contact_volume(const ContactForm& alpha, const VolumeOptions& opt = {});

/// Single-sign check of the alpha ^ dalpha density on the verification grid.
bool contact_check(const ContactForm& alpha, const VolumeOptions& opt = {});

/// Density range (min,max) on the quadrature grid; diagnostic.
std::pair<double, double> density_range(const ContactForm& alpha, const VolumeOptions& opt = {});

struct PeriodicOrbit;  // reebflow.hpp

/// (rho_sys, rho_dia) from class-h orbit periods.  Throws EmptyOrbitSet.
std::pair<double, double> ratios(const ContactForm& alpha,
                                 const std::vector<PeriodicOrbit>& orbits,
                                 std::optional<double> volume = std::nullopt);

struct C3Options {
    int n_points = 160;   // sample points on S^3 (prefix-stable sequence)
    double fd_step = 1e-2;
};

/// Sampled estimate (lower bound) of ||a1 - a2||_{C^3-} = ||.||_{C^2} + ||d.||_{C^2}.
double c3_minus_distance(const ContactForm& a1, const ContactForm& a2, const C3Options& opt = {});

/// Darboux chart at z_* = (1,0,0,0) with D^* alpha_* = dphi + lambda_st.
struct DarbouxChart {
    double radius = std::sqrt(2.0);   // chart ball radius in x
    double margin = 1e-6;

    /// forward(x, phi) = ( sqrt(1-|x|^2/2) e^{2 pi i phi}, (x1+i x2)/sqrt(2) e^{2 pi i phi} )
    Vec4 forward(const Vec2& x, double phi) const;
    /// Tangent map columns (d/dx1, d/dx2, d/dphi) at (x, phi).
    std::array<Vec4, 3> forward_tangent(const Vec2& x, double phi) const;
    /// Inverse on the image.  Throws OutOfChart near |x| = sqrt(2).
    std::pair<Vec2, double> inverse(const Vec4& q) const;
};

DarbouxChart darboux_chart();

/// Named perturbation generators used across the test-bed.  All three vanish
/// to second order on the reference fiber {z2 = 0} (so the fiber stays an
/// exact Reeb orbit) and are deck-invariant for every lens order.
///   "radial"  : (x2^2 + x3^2 - x0^2 - x1^2)/2        ( = u - 1/2 on S^3 )
///   "resonant": (x0 x2 + x1 x3)^2                    ( = u(1-u) cos^2(2 pi psi) )
///   "mixed"   : (x0 x2 + x1 x3)(x0 x3 - x1 x2)       ( = u(1-u) cos sin )
Poly named_generator(const std::string& name);

} // namespace reeblab
