#pragma once

#include <complex>
#include <vector>

#include "reeblab/discmodel.hpp"
#include "reeblab/forms3d.hpp"
#include "reeblab/reebflow.hpp"

namespace reeblab {

/// Result of bringing a form to the normal position: (1/T) U^* alpha with an
/// ambient unitary U of C^2 moving the reference fiber onto the orbit circle.
/// When the orbit is not an exact circle, U only moves gamma(0) to z_* and the
/// returned form is flagged non-circular; the reference fiber is then the
/// orbit through z_* rather than the round fiber.
struct NormalizedForm {
    ContactForm form;      // (1/T) U^* alpha
    double T_ref = 1.0;    // period of the normalising orbit in original time units
    bool circular = true;
    double align_residual = 0;      // max deviation of the orbit from the rotated fiber
    double fiber_closure = 0;       // |Phi_1(z_*) - z_*| for the normalised form
    double fiber_param = 0;         // sup_t |Phi_t(z_*) - gamma_*(t)|
};

NormalizedForm normalize(const ContactForm& alpha, const PeriodicOrbit& gamma,
                         const IntegratorConfig& cfg = {}, bool require_circular = false);

/// Nodal pullback lambda = S^* alpha on a collar grid.  Throws NotNormalized
/// if the reference fiber fails to close under the flow of alpha.
struct LambdaGrid {
    std::vector<double> r_nodes;
    int n_theta = 0;
    std::vector<double> lam_r, lam_th, density;  // density = dlambda / (dr ^ dtheta)
    double boundary_deviation = 0;               // max |lam_th(0,.) + t_sigma|
};

LambdaGrid pull_lambda(const ContactForm& alpha_normalized, int n_r = 32, int n_theta = 64,
                       const IntegratorConfig& cfg = {});

struct ReturnGridConfig {
    int n_r = 40;        // Gauss nodes in the collar radius
    int n_theta = 64;    // equispaced collar angles
    int n_s = 24;        // Gauss nodes in the cap radius |w|
    int n_phi = 48;      // equispaced cap angles
    double collar_split = 0.6;  // collar covers r in (0, split * a_max]
    IntegratorConfig integ{};
};

/// Return time / return map data on the two-patch grid (collar in (r,theta),
/// center cap in the w chart, where the collar formulas degenerate).
struct ReturnData {
    DiscModel disc;
    double T_ref = 1.0;
    ReturnGridConfig cfg;

    // collar patch, arrays indexed i * n_theta + j
    std::vector<double> r_nodes, r_wts;
    std::vector<double> tau_c;
    std::vector<Cplx> pw_c;                  // return point in the global w chart
    std::vector<double> lam_r, lam_th, f_c;  // pulled-back lambda and dlambda density
    std::vector<double> lam_image_r, lam_image_th;  // lambda at the return points

    // cap patch, arrays indexed i * n_phi + j
    double w_cap = 0;
    std::vector<double> s_nodes, s_wts;
    std::vector<double> tau_k;
    std::vector<Cplx> pw_k;
    std::vector<double> g_k;  // dlambda density per dw1 ^ dw2

    // boundary ring (quadratic one-sided extrapolation in r)
    std::vector<double> tau_bdry;     // per theta node
    std::vector<double> dtheta_bdry;  // boundary circle map displacement in (-1/2,1/2)

    int collar_index(int i, int j) const { return i * cfg.n_theta + j; }
    int cap_index(int i, int j) const { return i * cfg.n_phi + j; }

    /// Integral over N of a nodal field against dlambda; fields given on both
    /// patches in the same index order as tau.
    double integral_dlambda(const std::vector<double>& collar_field,
                            const std::vector<double>& cap_field) const;

    double integral_tau_dlambda() const;
    double integral_sigma_dlambda() const;  // sigma = tau - 1

    /// Mean boundary displacement (first-order rotation number estimate).
    double boundary_rotation() const;
};

ReturnData return_map(const ContactForm& alpha_normalized, const ReturnGridConfig& cfg = {});

/// sigma = tau - 1 and the Calabi invariant; cal is reported in the original
/// (unnormalised) time units, cal = T_ref^2 * (1/2) int sigma dlambda.
struct CalabiReport {
    double cal_normalized = 0;
    double cal = 0;
    double int_sigma_dlambda = 0;
    double vol_from_tau = 0;          // int tau dlambda (normalised units)
    double identity_residual = 0;     // |vol' - (2 cal_n + t_sigma)| / vol'
};

CalabiReport action_and_calabi(const ReturnData& rd, double vol_normalized);

struct FixedPointRecord {
    Cplx w;
    double tau = 0;
    double sigma = 0;
    double closure_residual = 0;   // |Phi_tau(S(q)) - S(q)| ambient
    double period_residual = 0;    // |T_closed - (1 + sigma)|
};

/// Interior fixed points of P (grid scan + Newton polish); each is flown and
/// its closure and period identity are verified.
std::vector<FixedPointRecord> fixed_point_orbit_check(const ReturnData& rd,
                                                      const ContactForm& alpha_normalized,
                                                      double scan_threshold = 2e-2);

/// max over interior collar nodes of |P^* lambda - lambda - dtau| components.
double exactness_nodal_residual(const ReturnData& rd);

/// max over the boundary ring of |tau - 1 - int_q^{P q} lambda_*|.
double boundary_identity_residual(const ReturnData& rd);

/// Derivative-free restatement of exactness: for random closed loops l,
/// | oint_{P l} lambda - oint_l lambda |  (both computed in ambient space,
/// the image loop differentiated spectrally).  Returns the max residual.
double loop_exactness_residual(const ContactForm& alpha_normalized, int n_loops = 20,
                               uint64_t seed = 2024, const IntegratorConfig& cfg = {},
                               int cheb_nodes = 24);

/// Zoll diagnostics: (max |P - id| in w, max |tau - 1|).
std::pair<double, double> zoll_return_deviation(const ReturnData& rd);

} // namespace reeblab
