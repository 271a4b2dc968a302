#pragma once

#include <functional>
#include <vector>

#include "reeblab/discmodel.hpp"
#include "reeblab/numerics.hpp"

namespace reeblab {

/// Shared evaluation grid on the model disc: Chebyshev-Lobatto nodes in the
/// collar radius rho over [0, a_max] and equispaced angles (period 1).
struct DiscGrid {
    DiscModel disc;
    std::vector<double> rho;
    std::vector<double> rho_bw;                // barycentric weights
    std::vector<std::vector<double>> d_rho;    // differentiation matrix
    std::vector<double> cc;                    // Clenshaw-Curtis weights
    int n_theta = 64;

    DiscGrid(const DiscModel& d, int n_rho, int n_th);

    int n_rho() const { return (int)rho.size(); }
    int idx(int i, int j) const { return i * n_theta + j; }
    double theta(int j) const { return double(j) / n_theta; }

    /// integral over N of a nodal field against dlambda = r dr ^ dtheta
    double integral_dlambda(const std::vector<double>& f) const;
};

/// Nodal scalar field on a DiscGrid with spectral interpolation.
struct NodalField {
    const DiscGrid* grid = nullptr;
    std::vector<double> v;

    NodalField() = default;
    NodalField(const DiscGrid& g, double fill = 0.0) : grid(&g), v(g.n_rho() * g.n_theta, fill) {}

    double& at(int i, int j) { return v[grid->idx(i, j)]; }
    double at(int i, int j) const { return v[grid->idx(i, j)]; }

    /// barycentric interpolation in rho along the grid angle line j
    double eval_line(double rho, int j) const;
    /// full interpolation (Fourier in theta, then barycentric in rho)
    double eval(double rho, double theta) const;

    NodalField d_drho() const;
    NodalField d_dtheta() const;
};

/// Smooth plateau: 1 on [0, r1], 0 on [r2, a]; C-infinity exp-type transition.
struct Plateau {
    double r1, r2;
    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
};

/// Closed-form element of the space V: functions on N with f = 0 and df = 0
/// at the boundary r = 0, finite V-norm, and radial on {r >= r_plateau}.
/// Terms are  v * core(v) * trig(2 pi m theta) * [plateau]  with v = r^2;
/// angular terms carry the plateau so the function is exactly radial near the
/// disc center.
class VFunction {
public:
    struct Term {
        int m = 0;
        bool is_sin = false;
        std::vector<double> core;  // coefficients of core(v), v = r^2
        bool cut = false;
    };

    struct Jet {
        double g = 0, g_r = 0, g_t = 0, g_rr = 0, g_rt = 0, g_tt = 0;
        double hr = 0;    // (1/r) dG/dr
        double ht = 0;    // (1/r^2) dG/dtheta
        double hr_r = 0, hr_t = 0, ht_r = 0, ht_t = 0;
    };

    VFunction() = default;
    VFunction(DiscModel disc, std::vector<Term> terms);

    const DiscModel& disc() const { return disc_; }
    const std::vector<Term>& terms() const { return terms_; }
    /// functions are exactly radial on {r >= r_plateau()}
    double r_plateau() const { return plateau_.r2; }

    Jet jet(double r, double theta) const;
    double value(double r, double theta) const { return jet(r, theta).g; }

    VFunction scaled(double c) const;

    /// Sampled V-norm: ||G||_C2 + ||(1/r) dG||_C1 (closed-form derivatives).
    double vnorm(int n_r = 96, int n_theta = 64) const;

    /// Random admissible G with prescribed V-norm.
    static VFunction random(DiscModel disc, uint64_t seed, double target_vnorm,
                            int max_m = 3);

    /// Simple constructors used by tests: radial polynomial in v = r^2
    /// (profile v * core(v)) and a single angular term.
    static VFunction radial(DiscModel disc, std::vector<double> core);
    static VFunction angular(DiscModel disc, int m, bool is_sin, std::vector<double> core);

private:
    DiscModel disc_;
    std::vector<Term> terms_;
    Plateau plateau_{0, 0};
};

/// f = r * fhat by the Taylor-remainder quadrature (Gauss in u, 16 nodes),
/// for nodal data; throws NonVanishingBoundary if f(0,.) != 0.
NodalField hat_divide(const NodalField& f);

/// Division by rho for nodal data vanishing at the binding: plain division on
/// {rho >= delta_frac * a} and the Taylor-remainder quadrature on the short
/// rays near rho = 0 (where the integrand never crosses the plateau band).
NodalField hat_divide_hybrid(const NodalField& f, double delta_frac = 0.15);

/// Lemma-4.8 style splitting d_rho f = rho f_rho, d_theta f = rho^2 f_theta.
struct RadialSplit {
    NodalField f_rho, f_theta;
    double norm_split;   // ||f_rho||_C1 + ||f_theta||_F
    double norm_hat;     // ||(1/rho) df||_C1 (sampled)
};
RadialSplit radial_split(const NodalField& f);

} // namespace reeblab
