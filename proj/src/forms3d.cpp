#include "reeblab/forms3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reeblab/errors.hpp"
#include "reeblab/numerics.hpp"
#include "reeblab/reebflow.hpp"

namespace reeblab {

ContactForm zoll_form(int p) {
    if (p < 1) throw ConfigError("zoll_form: lens order must be >= 1");
    ContactForm a;
    a.omega = standard_zoll_oneform() * double(p);
    a.lens_order = p;
    a.kind = FormKind::zoll_reference;
    return a;
}

ContactForm perturbed_form(int p, const Poly& f, double eps) {
    ContactForm a = zoll_form(p);
    Poly g = Poly(1.0) + f * eps;
    a.omega = a.omega.scaled_by(g);
    a.kind = FormKind::scaled_perturbation;
    return a;
}

ContactForm with_exact_shift(const ContactForm& alpha, const Poly& h) {
    ContactForm a = alpha;
    a.omega = alpha.omega + exterior_derivative(h);
    a.kind = FormKind::one_form_shift;
    return a;
}

ContactForm scaled_form(const ContactForm& alpha, double c) {
    ContactForm a = alpha;
    a.omega = alpha.omega * c;
    return a;
}

ContactForm rescaled_pullback(const ContactForm& alpha, const Mat4& U, double c) {
    ContactForm a = alpha;
    a.omega = alpha.omega.pullback_linear(U) * (1.0 / c);
    return a;
}

Vec4 reeb_at(const ContactForm& alpha, const Point4& q, double tol) {
    auto b = tangent_basis(q.x);
    // A_ij = dalpha(b_i, b_j); kernel direction of the 3x3 antisymmetric matrix
    double a01 = alpha.d_eval(q.x, b[0], b[1]);
    double a02 = alpha.d_eval(q.x, b[0], b[2]);
    double a12 = alpha.d_eval(q.x, b[1], b[2]);
    Vec4 dir = b[0] * a12 + b[1] * (-a02) + b[2] * a01;
    double dn = dir.norm();
    double s = alpha.eval(q.x, dir);
    if (std::abs(s) < tol * std::max(dn, 1e-30))
        throw DegenerateContact("reeb_at: contact condition fails numerically");
    return dir * (1.0 / s);
}

namespace {

// Hopf torus parameterisation: u = |z2|^2, angles in units of full turns.
struct HopfFrame {
    Vec4 q, du, dphi1, dphi2;
};

HopfFrame hopf_frame(double u, double p1, double p2) {
    double r1 = std::sqrt(1.0 - u), r2 = std::sqrt(u);
    double c1 = std::cos(kTwoPi * p1), s1 = std::sin(kTwoPi * p1);
    double c2 = std::cos(kTwoPi * p2), s2 = std::sin(kTwoPi * p2);
    HopfFrame f;
    f.q = {{r1 * c1, r1 * s1, r2 * c2, r2 * s2}};
    double dr1 = -0.5 / r1, dr2 = 0.5 / r2;
    f.du = {{dr1 * c1, dr1 * s1, dr2 * c2, dr2 * s2}};
    f.dphi1 = {{-kTwoPi * r1 * s1, kTwoPi * r1 * c1, 0, 0}};
    f.dphi2 = {{0, 0, -kTwoPi * r2 * s2, kTwoPi * r2 * c2}};
    return f;
}

// density of alpha ^ dalpha against -du ^ dphi1 ^ dphi2 (Zoll density = +1)
double density_at(const ContactForm& a, const HopfFrame& f) {
    double w1 = a.eval(f.q, f.du);
    double w2 = a.eval(f.q, f.dphi1);
    double w3 = a.eval(f.q, f.dphi2);
    double d23 = a.d_eval(f.q, f.dphi1, f.dphi2);
    double d13 = a.d_eval(f.q, f.du, f.dphi2);
    double d12 = a.d_eval(f.q, f.du, f.dphi1);
    return -(w1 * d23 - w2 * d13 + w3 * d12);
}

struct DensityScan {
    double integral, dmin, dmax;
};

DensityScan scan_density(const ContactForm& a, const VolumeOptions& opt) {
    // Gauss-Legendre in u (the one non-periodic direction), midpoint in the
    // angles.  For polynomial forms the angular averages are trigonometric
    // polynomials and the averaged u-profile is polynomial, so the rule is
    // exact well below the 1e-8 budget.
    Quadrature qu = gauss_legendre(opt.n_u, 0.0, 1.0);
    Quadrature qa = midpoint(opt.n_angle, 0.0, 1.0);
    double integral = 0;
    double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin;
    for (int i = 0; i < opt.n_u; ++i) {
        double su = 0;
        for (int j = 0; j < opt.n_angle; ++j) {
            for (int k = 0; k < opt.n_angle; ++k) {
                HopfFrame f = hopf_frame(qu.nodes[i], qa.nodes[j], qa.nodes[k]);
                double d = density_at(a, f);
                su += d * qa.weights[j] * qa.weights[k];
                dmin = std::min(dmin, d);
                dmax = std::max(dmax, d);
            }
        }
        integral += su * qu.weights[i];
    }
    return {integral, dmin, dmax};
}

} // namespace

double contact_volume(const ContactForm& alpha, const VolumeOptions& opt) {
    DensityScan s = scan_density(alpha, opt);
    if (s.dmin <= 0.0 && s.dmax >= 0.0)
        throw NonOrientedDensity("contact_volume: alpha ^ dalpha changes sign on the grid");
    return s.integral / alpha.lens_order;
}

bool contact_check(const ContactForm& alpha, const VolumeOptions& opt) {
    DensityScan s = scan_density(alpha, opt);
    return s.dmin > 0.0 || s.dmax < 0.0;
}

std::pair<double, double> density_range(const ContactForm& alpha, const VolumeOptions& opt) {
    DensityScan s = scan_density(alpha, opt);
    return {s.dmin, s.dmax};
}

std::pair<double, double> ratios(const ContactForm& alpha,
                                 const std::vector<PeriodicOrbit>& orbits,
                                 std::optional<double> volume) {
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0;
    for (const auto& o : orbits) {
        if (!o.class_h) continue;
        tmin = std::min(tmin, o.period);
        tmax = std::max(tmax, o.period);
    }
    if (!(tmax > 0)) throw EmptyOrbitSet("ratios: no class-h orbits supplied");
    double vol = volume ? *volume : contact_volume(alpha);
    return {tmin * tmin / vol, tmax * tmax / vol};
}

double c3_minus_distance(const ContactForm& a1, const ContactForm& a2, const C3Options& opt) {
    OneForm diff = a1.omega - a2.omega;
    auto pts = SpherePoints::generate(opt.n_points);
    const double h = opt.fd_step;
    double sup = 0;

    auto probe = [&](const Vec4& q) {
        auto b = tangent_basis(q);
        auto at = [&](const Vec4& p, auto&& f) {
            // re-projected point with the base frame transported by projection
            // (continuous in the displacement, unlike a fresh Gram-Schmidt)
            Vec4 pn = p.normalized();
            std::array<Vec4, 3> bb;
            for (int i = 0; i < 3; ++i) {
                Vec4 t = b[i] + (-b[i].dot(pn)) * pn;
                bb[i] = t * (1.0 / t.norm());
            }
            return f(pn, bb);
        };
        // C^0, C^1, C^2 pieces of the one-form and of its exterior derivative,
        // sampled in frame directions; geodesic-direction finite differences.
        auto val_form = [&](const Vec4& p, const std::array<Vec4, 3>& bb, int i) {
            return diff.eval(p, bb[i]);
        };
        auto val_dform = [&](const Vec4& p, const std::array<Vec4, 3>& bb, int i, int j) {
            return diff.d_eval(p, bb[i], bb[j]);
        };
        for (int i = 0; i < 3; ++i) {
            double f0 = val_form(q, b, i);
            sup = std::max(sup, std::abs(f0));
            for (int dir = 0; dir < 3; ++dir) {
                Vec4 qp = q + b[dir] * h, qm = q - b[dir] * h;
                double fp = at(qp, [&](const Vec4& p, const std::array<Vec4, 3>& bb) { return val_form(p, bb, i); });
                double fm = at(qm, [&](const Vec4& p, const std::array<Vec4, 3>& bb) { return val_form(p, bb, i); });
                sup = std::max(sup, std::abs(fp - fm) / (2 * h));
                sup = std::max(sup, std::abs(fp - 2 * f0 + fm) / (h * h));
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                double f0 = val_dform(q, b, i, j);
                sup = std::max(sup, std::abs(f0));
                for (int dir = 0; dir < 3; ++dir) {
                    Vec4 qp = q + b[dir] * h, qm = q - b[dir] * h;
                    double fp = at(qp, [&](const Vec4& p, const std::array<Vec4, 3>& bb) { return val_dform(p, bb, i, j); });
                    double fm = at(qm, [&](const Vec4& p, const std::array<Vec4, 3>& bb) { return val_dform(p, bb, i, j); });
                    sup = std::max(sup, std::abs(fp - fm) / (2 * h));
                    sup = std::max(sup, std::abs(fp - 2 * f0 + fm) / (h * h));
                }
            }
        }
    };

    for (const auto& p : pts) probe(Vec4{{p[0], p[1], p[2], p[3]}});
    return sup;
}

Vec4 DarbouxChart::forward(const Vec2& x, double phi) const {
    double n2 = x.x * x.x + x.y * x.y;
    double r1 = std::sqrt(1.0 - 0.5 * n2);
    Cplx e = std::polar(1.0, kTwoPi * phi);
    Cplx z1 = r1 * e;
    Cplx z2 = (Cplx(x.x, x.y) / std::sqrt(2.0)) * e;
    return Vec4::from_complex(z1, z2);
}

std::array<Vec4, 3> DarbouxChart::forward_tangent(const Vec2& x, double phi) const {
    double n2 = x.x * x.x + x.y * x.y;
    double r1 = std::sqrt(1.0 - 0.5 * n2);
    Cplx e = std::polar(1.0, kTwoPi * phi);
    const double s2 = std::sqrt(2.0);
    Vec4 dx1 = Vec4::from_complex((-0.5 * x.x / r1) * e, e / s2);
    Vec4 dx2 = Vec4::from_complex((-0.5 * x.y / r1) * e, (Cplx(0, 1) / s2) * e);
    Cplx ie = Cplx(0, kTwoPi) * e;
    Vec4 dphi = Vec4::from_complex(r1 * ie, (Cplx(x.x, x.y) / s2) * ie);
    return {dx1, dx2, dphi};
}

std::pair<Vec2, double> DarbouxChart::inverse(const Vec4& q) const {
    Cplx z1 = q.z1(), z2 = q.z2();
    double a1 = std::abs(z1);
    double xnorm = std::sqrt(std::max(0.0, 2.0 * (1.0 - a1 * a1)));
    if (xnorm >= std::sqrt(2.0) * (1.0 - margin))
        throw OutOfChart("darboux inverse: point outside the chart");
    double phi = std::arg(z1) / kTwoPi;
    Cplx xc = std::sqrt(2.0) * z2 * std::conj(z1) / a1;
    return {Vec2::from_c(xc), phi};
}

DarbouxChart darboux_chart() { return DarbouxChart{}; }

Poly named_generator(const std::string& name) {
    auto X = [](int i) { return Poly::coordinate(i); };
    if (name == "radial")  // u - 1/2 on S^3, u = |z2|^2
        return (X(2) * X(2) + X(3) * X(3) - X(0) * X(0) - X(1) * X(1)) * 0.5;
    Poly re = X(0) * X(2) + X(1) * X(3);   // Re(conj(z1) z2)
    Poly im = X(0) * X(3) - X(1) * X(2);   // Im(conj(z1) z2)
    if (name == "resonant") return re * re;
    if (name == "mixed") return re * im;
    throw ConfigError("unknown perturbation generator: " + name);
}

} // namespace reeblab
