#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "reeblab/vfunction.hpp"

namespace reeblab {

/// Weinstein chart on the collar product: (r,theta,R,Theta) -> T^* A,
///   rho = R, vartheta = theta, p_rho = R (theta - Theta), p_theta = (R^2-r^2)/2.
/// Domain restriction |theta - Theta| < 1/2.
struct WeinsteinImage {
    double rho, vartheta, p_rho, p_theta;
};
WeinsteinImage weinstein_map(double r, double theta, double R, double Theta);

struct WeinsteinPreimage {
    double r, theta, R, Theta;
};
WeinsteinPreimage weinstein_inverse(double rho, double vartheta, double p_rho, double p_theta);

/// K_A(r,theta,R,Theta) = (k - R^2/2)(theta - Theta).
double k_primitive(double r, double theta, double R, double Theta, double k);

/// Exact diffeomorphism of the model disc (N, lambda = (-k + r^2/2) dtheta),
/// held as collar evaluators: phi(r,theta) = (R(r,theta), theta + Dtheta(r,theta))
/// together with its normalised action sigma.
struct ExactDiscMap {
    DiscModel disc;
    std::function<double(double, double)> R;
    std::function<double(double, double)> Dtheta;
    std::function<double(double, double)> sigma;

    std::pair<double, double> apply(double r, double theta) const {
        return {R(r, theta), theta + Dtheta(r, theta)};
    }

    static ExactDiscMap identity(DiscModel disc);
};

/// Generating-function interface used by the E-construction: value and the
/// division-free derivatives G_rho = (1/rho) dG/drho, G_t = (1/rho^2) dG/dtheta,
/// plus d(G_t)/drho for Newton polishing of the radial inversion.
struct GenFunction {
    DiscModel disc;
    std::function<double(double, double)> g;
    std::function<double(double, double)> g_rho;
    std::function<double(double, double)> g_t;
    std::function<double(double, double)> g_t_rho;

    static GenFunction from_vfunction(const VFunction& G);
    /// Spectral realisation of nodal data (values on a DiscGrid).  The grid
    /// object must outlive the GenFunction.
    static GenFunction from_nodal(std::shared_ptr<DiscGrid> grid, std::vector<double> values);
};

/// E: generating function -> exact diffeomorphism (Prop.-style construction
/// through the collar chart; the binding r = 0 maps to itself exactly).
/// Throws NonMonotone if rho -> rho sqrt(1 - 2 G_t) fails strict monotonicity.
ExactDiscMap map_from_gen(const GenFunction& G);
inline ExactDiscMap map_from_gen(const VFunction& G) {
    return map_from_gen(GenFunction::from_vfunction(G));
}

/// G: exact diffeomorphism -> generating function with the full division-free
/// jet, through the collar chart identities
///   G = (sigma - K o Gamma_phi) o nu^{-1},
///   (1/rho) dG/drho = -(Theta_phi - theta) o nu^{-1},
///   (1/rho^2) dG/dtheta = (1 - (r_phi/rho)^2)/2,
/// with r_phi the per-angle monotone inverse of r -> R_phi(r, theta)
/// (cached spectral interpolants per angle line; no nodal differentiation).
GenFunction gen_function_of_map(const ExactDiscMap& phi);

/// Nodal sampling of the generating function on a grid.
std::vector<double> gen_from_map(const ExactDiscMap& phi, const DiscGrid& grid);

/// Pointwise inverse of an exact disc map (2D Newton); sigma_inv = -sigma o inv.
ExactDiscMap map_inverse(const ExactDiscMap& phi);

/// Interior fixed points of phi on a scan grid with Newton polish.
struct MapFixedPoint {
    double r, theta;
    double sigma;
};
std::vector<MapFixedPoint> interior_fixed_points(const ExactDiscMap& phi, int n_scan_r = 40,
                                                 int n_scan_theta = 64, double tol = 1e-9);

/// Hamiltonian data of the path t -> E(tG) on an evaluation grid:
/// X_t and H_t are sampled at the moved points phi_t(node) via finite
/// differences in t; h_moved(i_t) holds H_{t_i} o phi_{t_i} on the grid.
struct HamiltonianPath {
    std::shared_ptr<DiscGrid> grid;
    std::vector<double> t_nodes;
    // per t-node arrays over the grid
    std::vector<std::vector<double>> r_moved, th_moved;  // phi_t(node)
    std::vector<std::vector<double>> sigma_t;            // action of phi_t at node
    std::vector<std::vector<double>> xr, xth;            // X_t components at moved points
    std::vector<std::vector<double>> h_moved;            // H_t o phi_t at node
    std::vector<std::vector<double>> g_nu;               // G o nu_t at node
};

HamiltonianPath hamiltonian_of_path(const VFunction& G, int n_t = 17, int n_rho = 40,
                                    int n_theta = 64);

/// sup over interior nodes and t of |G o nu_t - H_t o phi_t|  (Hamilton-Jacobi).
double hj_residual(const HamiltonianPath& path);

/// Residual of the collar identity X^R = (1/R) dH/dTheta at the moved points.
double hamiltonian_field_residual(const HamiltonianPath& path);

struct QAReport {
    bool degenerate = false;
    double r_min = 0, th_min = 0, r_max = 0, th_max = 0;  // extremisers of G
    // stationarity of the sampled extremisers: distance (disc metric) from the
    // argmin/argmax at time t to the near-extremal set at t = 0.  The set form
    // absorbs exact ties (boundary ring, disc center, radial critical circles).
    double drift_min = 0, drift_max = 0;
    double value_dev_min = 0, value_dev_max = 0;  // |H_t(q*) - G(q*)| via generic evaluation
};

/// Quasi-autonomy certificate for the path t -> E(tG).
QAReport quasi_autonomous_path(const VFunction& G, const HamiltonianPath& path);

/// Largest nearest-neighbour distance of the path sample in the disc metric
/// (the scale against which argmin drift is judged).
double path_grid_spacing(const DiscGrid& grid);

struct CalabiValues {
    double from_sigma = 0;   // (1/2) int sigma dlambda
    double from_h = 0;       // int_0^1 int_N H_t dlambda dt
    double difference = 0;
};

/// Calabi invariant from the action of phi; when a path is supplied the
/// Hamiltonian double integral is evaluated as well.
double calabi(const ExactDiscMap& phi, const DiscGrid& grid);
CalabiValues calabi_both(const ExactDiscMap& phi, const HamiltonianPath& path);

struct WitnessPoint {
    double r, theta;
    double g_value;
    double sigma_value;
    double fix_residual;
};

/// Cor.-style sign witness: for CAL <= 0 an interior fixed point with
/// sigma < 0 (the minimiser of G), mirrored for CAL >= 0.
/// Throws WitnessNotFound if the guaranteed point cannot be located.
WitnessPoint sign_witness(const VFunction& G, const ExactDiscMap& phi, const DiscGrid& grid,
                          double cal);

} // namespace reeblab
