#include "reeblab/discmaps.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reeblab/errors.hpp"

namespace reeblab {

WeinsteinImage weinstein_map(double r, double theta, double R, double Theta) {
    if (std::abs(theta - Theta) >= 0.5)
        throw OutOfDomain("weinstein_map: |theta - Theta| >= 1/2");
    return {R, theta, R * (theta - Theta), 0.5 * (R * R - r * r)};
}

WeinsteinPreimage weinstein_inverse(double rho, double vartheta, double p_rho, double p_theta) {
    if (rho == 0.0) throw DivisionAtBinding("weinstein_inverse: rho = 0");
    double rad = rho * rho - 2.0 * p_theta;
    if (rad < 0.0) throw NegativeRadicand("weinstein_inverse: rho^2 - 2 p_theta < 0");
    return {std::sqrt(rad), vartheta, rho, vartheta - p_rho / rho};
}

double k_primitive(double r, double theta, double R, double Theta, double k) {
    if (std::abs(theta - Theta) >= 0.5)
        throw OutOfDomain("k_primitive: |theta - Theta| >= 1/2");
    (void)r;
    return (k - 0.5 * R * R) * (theta - Theta);
}

ExactDiscMap ExactDiscMap::identity(DiscModel disc) {
    ExactDiscMap m;
    m.disc = disc;
    m.R = [](double r, double) { return r; };
    m.Dtheta = [](double, double) { return 0.0; };
    m.sigma = [](double, double) { return 0.0; };
    return m;
}

GenFunction GenFunction::from_vfunction(const VFunction& G) {
    GenFunction g;
    g.disc = G.disc();
    auto Gc = std::make_shared<VFunction>(G);
    g.g = [Gc](double r, double t) { return Gc->jet(r, t).g; };
    g.g_rho = [Gc](double r, double t) { return Gc->jet(r, t).hr; };
    g.g_t = [Gc](double r, double t) { return Gc->jet(r, t).ht; };
    g.g_t_rho = [Gc](double r, double t) { return Gc->jet(r, t).ht_r; };
    return g;
}

namespace {

struct NodalPack {
    std::shared_ptr<DiscGrid> grid;
    NodalField f, f_rho, f_t, f_t_rho;
};

double nodal_eval(const NodalField& f, double rho, double theta) {
    const DiscGrid& g = *f.grid;
    double jj = theta * g.n_theta;
    int j = (int)std::lround(jj);
    if (std::abs(jj - j) < 1e-9) {
        int jm = ((j % g.n_theta) + g.n_theta) % g.n_theta;
        return f.eval_line(rho, jm);
    }
    return f.eval(rho, theta);
}

} // namespace

GenFunction GenFunction::from_nodal(std::shared_ptr<DiscGrid> grid, std::vector<double> values) {
    auto pack = std::make_shared<NodalPack>();
    pack->grid = grid;
    pack->f = NodalField(*grid);
    pack->f.v = std::move(values);

    // Elements of V have f = 0 and df = 0 on the boundary row; enforce the
    // space's boundary conditions exactly (spectral differentiation of nodal
    // data reintroduces O(1e-9) noise there, which hat division would amplify).
    auto clamp_boundary = [&](NodalField& h, double tol, const char* what) {
        for (int j = 0; j < grid->n_theta; ++j) {
            if (std::abs(h.at(0, j)) > tol)
                throw NonVanishingBoundary(std::string("from_nodal: ") + what);
            h.at(0, j) = 0.0;
        }
    };
    clamp_boundary(pack->f, 1e-8, "values do not vanish at r = 0");
    NodalField fr = pack->f.d_drho();
    clamp_boundary(fr, 1e-6, "radial derivative does not vanish at r = 0");
    pack->f_rho = hat_divide_hybrid(fr);
    NodalField ft = pack->f.d_dtheta();
    clamp_boundary(ft, 1e-6, "angular derivative does not vanish at r = 0");
    NodalField ft1 = hat_divide_hybrid(ft);
    clamp_boundary(ft1, 1e-5, "angular derivative vanishes to first order only");
    pack->f_t = hat_divide_hybrid(ft1);
    pack->f_t_rho = pack->f_t.d_drho();

    GenFunction g;
    g.disc = grid->disc;
    g.g = [pack](double r, double t) { return nodal_eval(pack->f, r, t); };
    g.g_rho = [pack](double r, double t) { return nodal_eval(pack->f_rho, r, t); };
    g.g_t = [pack](double r, double t) { return nodal_eval(pack->f_t, r, t); };
    g.g_t_rho = [pack](double r, double t) { return nodal_eval(pack->f_t_rho, r, t); };
    return g;
}

ExactDiscMap map_from_gen(const GenFunction& G) {
    const double a = G.disc.a_max;
    const double k = G.disc.t_sigma;
    auto gp = std::make_shared<GenFunction>(G);

    // monotonicity of mu(rho) = rho sqrt(1 - 2 G_t) on a verification grid
    for (int i = 0; i <= 24; ++i)
        for (int j = 0; j < 16; ++j) {
            double rho = a * i / 24.0, th = j / 16.0;
            double gt = gp->g_t(rho, th);
            if (1.0 - 2.0 * gt < 0.25)
                throw NonMonotone("map_from_gen: 1 - 2 G_t too small (||G||_V too large)");
            double mu1 = std::sqrt(1 - 2 * gt) - rho * gp->g_t_rho(rho, th) / std::sqrt(1 - 2 * gt);
            if (mu1 <= 0.0)
                throw NonMonotone("map_from_gen: radial factor not strictly monotone");
        }

    auto solve_R = [gp, a](double r, double theta) {
        if (r <= 0.0) return 0.0;  // the binding maps to itself exactly
        if (r >= a) return a;
        auto mu = [&](double rho) {
            return rho * std::sqrt(1.0 - 2.0 * gp->g_t(rho, theta)) - r;
        };
        auto mup = [&](double rho) {
            double s = std::sqrt(1.0 - 2.0 * gp->g_t(rho, theta));
            return s - rho * gp->g_t_rho(rho, theta) / s;
        };
        return solve_bisect_newton(mu, mup, 0.0, a, 1e-13);
    };

    ExactDiscMap m;
    m.disc = G.disc;
    m.R = solve_R;
    m.Dtheta = [gp, solve_R](double r, double theta) {
        double R = solve_R(r, theta);
        return -gp->g_rho(R, theta);
    };
    m.sigma = [gp, solve_R, k](double r, double theta) {
        double R = solve_R(r, theta);
        double grho = gp->g_rho(R, theta);
        return gp->g(R, theta) + (k - 0.5 * R * R) * grho;
    };
    return m;
}

namespace {

// Per-angle cache of R_phi along Chebyshev lines with spectral inversion.
// The generating-function jet of a map needs the inverse r_phi(rho, theta)
// of the radial component; values interpolate to near machine precision even
// for plateau-type (non-analytic C-infinity) radial profiles, so no nodal
// differentiation enters here.
struct MapGenState {
    ExactDiscMap phi;
    std::vector<double> nodes, bw;
    std::map<long long, std::vector<double>> lines;

    explicit MapGenState(const ExactDiscMap& m) : phi(m) {
        // plateau-type radial profiles are C-infinity but not analytic; their
        // value interpolation needs this many nodes to clear 1e-10
        nodes = chebyshev_lobatto(128, 0.0, m.disc.a_max);
        bw = barycentric_weights(nodes);
    }

    const std::vector<double>& line(double theta) {
        long long key = llround(theta * 1e12);
        auto it = lines.find(key);
        if (it != lines.end()) return it->second;
        std::vector<double> Rcol(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            Rcol[i] = phi.R(nodes[i], theta);
            if (i > 0 && Rcol[i] <= Rcol[i - 1])
                throw NonMonotone("gen_function_of_map: R_phi not monotone along a line");
        }
        return lines.emplace(key, std::move(Rcol)).first->second;
    }

    double r_phi(double rho, double theta) {
        const double a = phi.disc.a_max;
        if (rho <= 0.0) return 0.0;
        if (rho >= a) return a;
        const auto& Rcol = line(theta);
        auto f = [&](double r) { return barycentric_eval(nodes, bw, Rcol, r) - rho; };
        auto fp = [&](double r) {
            const double h = 1e-7;
            double lo = std::max(0.0, r - h), hi = std::min(a, r + h);
            return (f(hi) - f(lo)) / (hi - lo);
        };
        return solve_bisect_newton(f, fp, 0.0, a, 1e-13);
    }

    // d r_phi / d rho at the binding (for the g_t limit), from the inner nodes
    double r_phi_slope0(double theta) {
        const auto& Rcol = line(theta);
        // R(r) ~ R'(0) r near 0  =>  r_phi'(0) = 1 / R'(0)
        double slope = (Rcol[2] - Rcol[0]) / (nodes[2] - nodes[0]);
        return 1.0 / slope;
    }
};

} // namespace

GenFunction gen_function_of_map(const ExactDiscMap& phi) {
    auto st = std::make_shared<MapGenState>(phi);
    const double k = phi.disc.t_sigma;

    auto g_t_fun = [st](double rho, double th) {
        if (rho < 1e-7) {
            double s = st->r_phi_slope0(th);
            return 0.5 * (1.0 - s * s);
        }
        double ratio = st->r_phi(rho, th) / rho;
        return 0.5 * (1.0 - ratio * ratio);
    };

    GenFunction g;
    g.disc = phi.disc;
    g.g = [st, k](double rho, double th) {
        double rstar = st->r_phi(rho, th);
        double dth = st->phi.Dtheta(rstar, th);
        if (std::abs(dth) >= 0.5)
            throw DomainOverflow("gen_function_of_map: |theta - Theta| >= 1/2");
        return st->phi.sigma(rstar, th) + (k - 0.5 * rho * rho) * dth;
    };
    g.g_rho = [st](double rho, double th) {
        return -st->phi.Dtheta(st->r_phi(rho, th), th);
    };
    g.g_t = g_t_fun;
    g.g_t_rho = [g_t_fun](double rho, double th) {
        const double h = 1e-6;
        double lo = std::max(0.0, rho - h);
        return (g_t_fun(rho + h, th) - g_t_fun(lo, th)) / (rho + h - lo);
    };
    return g;
}

std::vector<double> gen_from_map(const ExactDiscMap& phi, const DiscGrid& grid) {
    GenFunction g = gen_function_of_map(phi);
    std::vector<double> G(grid.n_rho() * grid.n_theta, 0.0);
    for (int j = 0; j < grid.n_theta; ++j) {
        double th = grid.theta(j);
        for (int i = 0; i < grid.n_rho(); ++i) G[grid.idx(i, j)] = g.g(grid.rho[i], th);
    }
    return G;
}

ExactDiscMap map_inverse(const ExactDiscMap& phi) {
    auto base = std::make_shared<ExactDiscMap>(phi);
    const double a = phi.disc.a_max;

    auto invert = [base, a](double rho, double vth) {
        // solve phi(r,theta) = (rho, vth) by damped 2D Newton
        double r = std::clamp(rho, 0.0, a), th = vth;
        for (int it = 0; it < 60; ++it) {
            double R = base->R(r, th);
            double dt = base->Dtheta(r, th);
            double fr = R - rho;
            double ft = th + dt - vth;
            ft -= std::round(ft);  // wrap angle error
            if (std::abs(fr) + std::abs(ft) < 1e-12) break;
            const double h = 1e-7;
            double R_r = (base->R(r + h, th) - base->R(std::max(0.0, r - h), th)) /
                         (r + h - std::max(0.0, r - h));
            double R_t = (base->R(r, th + h) - base->R(r, th - h)) / (2 * h);
            double T_r = (base->Dtheta(r + h, th) - base->Dtheta(std::max(0.0, r - h), th)) /
                         (r + h - std::max(0.0, r - h));
            double T_t = 1.0 + (base->Dtheta(r, th + h) - base->Dtheta(r, th - h)) / (2 * h);
            double det = R_r * T_t - R_t * T_r;
            if (std::abs(det) < 1e-14) break;
            double sr = (T_t * fr - R_t * ft) / det;
            double st = (-T_r * fr + R_r * ft) / det;
            r = std::clamp(r - sr, 0.0, a);
            th -= st;
        }
        return std::make_pair(r, th);
    };

    ExactDiscMap inv;
    inv.disc = phi.disc;
    inv.R = [invert](double rho, double vth) { return invert(rho, vth).first; };
    inv.Dtheta = [invert](double rho, double vth) { return invert(rho, vth).second - vth; };
    inv.sigma = [base, invert](double rho, double vth) {
        auto [r, th] = invert(rho, vth);
        return -base->sigma(r, th);
    };
    return inv;
}

std::vector<MapFixedPoint> interior_fixed_points(const ExactDiscMap& phi, int n_scan_r,
                                                 int n_scan_theta, double tol) {
    const double a = phi.disc.a_max;
    std::vector<MapFixedPoint> out;

    auto displacement = [&](double r, double th) {
        double fr = phi.R(r, th) - r;
        double ft = phi.Dtheta(r, th);
        return std::hypot(fr, r * ft);
    };

    auto polish = [&](double r, double th) -> std::optional<std::pair<double, double>> {
        for (int it = 0; it < 40; ++it) {
            double fr = phi.R(r, th) - r;
            double ft = phi.Dtheta(r, th);
            if (std::abs(fr) + r * std::abs(ft) < tol) return std::make_pair(r, th);
            const double h = 1e-7;
            double frr = (phi.R(r + h, th) - phi.R(std::max(0.0, r - h), th)) /
                             (r + h - std::max(0.0, r - h)) - 1.0;
            double frt = (phi.R(r, th + h) - phi.R(r, th - h)) / (2 * h);
            double ftr = (phi.Dtheta(r + h, th) - phi.Dtheta(std::max(0.0, r - h), th)) /
                         (r + h - std::max(0.0, r - h));
            double ftt = (phi.Dtheta(r, th + h) - phi.Dtheta(r, th - h)) / (2 * h);
            double det = frr * ftt - frt * ftr;
            if (std::abs(det) < 1e-16) return std::nullopt;
            double sr = (ftt * fr - frt * ft) / det;
            double st = (-ftr * fr + frr * ft) / det;
            if (std::hypot(sr, st) > 0.3) {
                double sc = 0.3 / std::hypot(sr, st);
                sr *= sc;
                st *= sc;
            }
            r -= sr;
            th -= st;
            if (r < 1e-4 || r > a * (1 - 1e-7)) return std::nullopt;
        }
        return std::nullopt;
    };

    for (int i = 1; i < n_scan_r; ++i) {
        double r = a * i / n_scan_r;
        for (int j = 0; j < n_scan_theta; ++j) {
            double th = double(j) / n_scan_theta;
            if (displacement(r, th) > 5e-3) continue;
            auto res = polish(r, th);
            if (!res) continue;
            auto [rf, tf] = *res;
            tf -= std::floor(tf);
            bool dup = false;
            for (const auto& f : out) {
                double dth = std::abs(f.theta - tf);
                dth = std::min(dth, 1.0 - dth);
                if (std::abs(f.r - rf) < 1e-5 && dth * rf < 1e-5) dup = true;
            }
            if (!dup) out.push_back({rf, tf, phi.sigma(rf, tf)});
        }
    }
    // the disc center is fixed by every admissible (radial-near-center) map
    out.push_back({a, 0.0, phi.sigma(a, 0.0)});
    std::sort(out.begin(), out.end(), [](const MapFixedPoint& x, const MapFixedPoint& y) {
        if (x.r != y.r) return x.r < y.r;
        return x.theta < y.theta;
    });
    return out;
}

namespace {

// 4th-order finite difference in t on a uniform grid
double fd_t(const std::vector<std::vector<double>>& f, int it, int node, double h, int n_t) {
    auto v = [&](int k) { return f[k][node]; };
    if (it >= 2 && it <= n_t - 3)
        return (v(it - 2) - 8 * v(it - 1) + 8 * v(it + 1) - v(it + 2)) / (12 * h);
    if (it == 0)
        return (-25 * v(0) + 48 * v(1) - 36 * v(2) + 16 * v(3) - 3 * v(4)) / (12 * h);
    if (it == 1)
        return (-3 * v(0) - 10 * v(1) + 18 * v(2) - 6 * v(3) + v(4)) / (12 * h);
    if (it == n_t - 2)
        return (3 * v(n_t - 1) + 10 * v(n_t - 2) - 18 * v(n_t - 3) + 6 * v(n_t - 4) -
                v(n_t - 5)) /
               (12 * h);
    return (25 * v(n_t - 1) - 48 * v(n_t - 2) + 36 * v(n_t - 3) - 16 * v(n_t - 4) +
            3 * v(n_t - 5)) /
           (12 * h);
}

} // namespace

HamiltonianPath hamiltonian_of_path(const VFunction& G, int n_t, int n_rho, int n_theta) {
    HamiltonianPath P;
    P.grid = std::make_shared<DiscGrid>(G.disc(), n_rho, n_theta);
    const DiscGrid& g = *P.grid;
    const double k = G.disc().t_sigma;
    int nn = g.n_rho() * g.n_theta;

    P.t_nodes.resize(n_t);
    P.r_moved.assign(n_t, std::vector<double>(nn));
    P.th_moved.assign(n_t, std::vector<double>(nn));
    P.sigma_t.assign(n_t, std::vector<double>(nn));
    P.g_nu.assign(n_t, std::vector<double>(nn));

    for (int it = 0; it < n_t; ++it) {
        double t = double(it) / (n_t - 1);
        P.t_nodes[it] = t;
        ExactDiscMap phi = map_from_gen(G.scaled(t));
        for (int i = 0; i < g.n_rho(); ++i)
            for (int j = 0; j < g.n_theta; ++j) {
                int id = g.idx(i, j);
                double r = g.rho[i], th = g.theta(j);
                double R = phi.R(r, th);
                P.r_moved[it][id] = R;
                P.th_moved[it][id] = th + phi.Dtheta(r, th);
                P.sigma_t[it][id] = phi.sigma(r, th);
                P.g_nu[it][id] = G.value(R, th);
            }
    }

    double h = 1.0 / (n_t - 1);
    P.xr.assign(n_t, std::vector<double>(nn));
    P.xth.assign(n_t, std::vector<double>(nn));
    P.h_moved.assign(n_t, std::vector<double>(nn));
    for (int it = 0; it < n_t; ++it)
        for (int id = 0; id < nn; ++id) {
            double xr = fd_t(P.r_moved, it, id, h, n_t);
            double xth = fd_t(P.th_moved, it, id, h, n_t);
            double dsdt = fd_t(P.sigma_t, it, id, h, n_t);
            double R = P.r_moved[it][id];
            P.xr[it][id] = xr;
            P.xth[it][id] = xth;
            P.h_moved[it][id] = dsdt - (-k + 0.5 * R * R) * xth;
        }
    return P;
}

double hj_residual(const HamiltonianPath& path) {
    double worst = 0;
    int n_t = (int)path.t_nodes.size();
    for (int it = 0; it < n_t; ++it)
        for (size_t id = 0; id < path.g_nu[it].size(); ++id)
            worst = std::max(worst, std::abs(path.g_nu[it][id] - path.h_moved[it][id]));
    return worst;
}

double hamiltonian_field_residual(const HamiltonianPath& path) {
    // verify R * X^R = dH/dTheta at the moved points via the chain rule on the
    // source grid (spectral derivatives of the moved fields)
    const DiscGrid& g = *path.grid;
    int n_t = (int)path.t_nodes.size();
    double worst = 0;
    for (int it = 1; it < n_t - 1; ++it) {
        NodalField R(g), TH(g), H(g);
        R.v = path.r_moved[it];
        TH.v = path.th_moved[it];
        H.v = path.h_moved[it];
        NodalField Rr = R.d_drho(), Rt = R.d_dtheta();
        NodalField Tr = TH.d_drho(), Tt = TH.d_dtheta();
        NodalField Hr = H.d_drho(), Ht = H.d_dtheta();
        for (int i = 1; i < g.n_rho() - 1; ++i)
            for (int j = 0; j < g.n_theta; ++j) {
                int id = g.idx(i, j);
                double det = Rr.v[id] * Tt.v[id] - Rt.v[id] * Tr.v[id];
                if (std::abs(det) < 1e-10) continue;
                // dH/dTheta at the moved point
                double H_Theta = (-Rt.v[id] * Hr.v[id] + Rr.v[id] * Ht.v[id]) / det;
                double res = path.r_moved[it][id] * path.xr[it][id] - H_Theta;
                worst = std::max(worst, std::abs(res));
            }
    }
    return worst;
}

namespace {

struct Extremum {
    enum Kind { boundary, center, interior, radial_circle } kind;
    double r, theta, value;
};

Extremum locate_extremum(const VFunction& G, bool minimum) {
    const double a = G.disc().a_max;
    const double sgn = minimum ? 1.0 : -1.0;
    // coarse scan (includes the boundary row r=0 and the center row r=a)
    int nr = 80, nt = 96;
    double best = 1e300, br = 0, bt = 0;
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j < nt; ++j) {
            double r = a * i / nr, th = double(j) / nt;
            double v = sgn * G.value(r, th);
            if (v < best) {
                best = v;
                br = r;
                bt = th;
            }
        }
    // classify and polish
    if (br < 1e-9 || best >= -1e-13) return {Extremum::boundary, 0.0, bt, 0.0};
    if (br > G.r_plateau()) {
        // radial zone: minimise the radial profile g(r) on [r_plateau, a]
        double r = br;
        for (int it = 0; it < 50; ++it) {
            auto J = G.jet(r, bt);
            if (std::abs(J.g_rr) < 1e-16) break;
            double step = J.g_r / J.g_rr;
            if (std::abs(step) > 0.1 * a) step = std::copysign(0.1 * a, step);
            double rn = std::clamp(r - step, G.r_plateau(), a);
            if (std::abs(rn - r) < 1e-13) {
                r = rn;
                break;
            }
            r = rn;
        }
        // the center point is critical in the disc even when g_r(a) != 0
        double vr = sgn * G.value(r, bt);
        double vc = sgn * G.value(a, bt);
        if (std::abs(G.jet(r, bt).g_r) < 1e-10 && vr <= vc && r < a - 1e-9)
            return {Extremum::radial_circle, r, bt, G.value(r, bt)};
        return {Extremum::center, a, 0.0, G.value(a, 0.0)};
    }
    // collar zone: 2D Newton on the gradient with the analytic Hessian
    double r = br, th = bt;
    for (int it = 0; it < 60; ++it) {
        auto J = G.jet(r, th);
        double det = J.g_rr * J.g_tt - J.g_rt * J.g_rt;
        if (std::abs(det) < 1e-16) break;
        double sr = (J.g_tt * J.g_r - J.g_rt * J.g_t) / det;
        double st = (-J.g_rt * J.g_r + J.g_rr * J.g_t) / det;
        if (std::hypot(sr, st) > 0.1 * a) {
            double sc = 0.1 * a / std::hypot(sr, st);
            sr *= sc;
            st *= sc;
        }
        r = std::clamp(r - sr, 1e-6, a - 1e-9);
        th -= st;
        if (std::hypot(sr, st) < 1e-14) break;
    }
    th -= std::floor(th);
    return {Extremum::interior, r, th, G.value(r, th)};
}

double disc_distance(const DiscModel& d, double r1, double t1, double r2, double t2) {
    return std::abs(d.w_of_collar(r1, t1) - d.w_of_collar(r2, t2));
}

} // namespace

QAReport quasi_autonomous_path(const VFunction& G, const HamiltonianPath& path) {
    QAReport rep;
    if (G.vnorm(24, 16) < 1e-14) {
        rep.degenerate = true;  // constant G: every point extremal
        return rep;
    }
    const DiscGrid& g = *path.grid;
    Extremum emin = locate_extremum(G, true);
    Extremum emax = locate_extremum(G, false);
    rep.r_min = emin.r;
    rep.th_min = emin.theta;
    rep.r_max = emax.r;
    rep.th_max = emax.theta;

    int n_t = (int)path.t_nodes.size();
    auto drift_of = [&](bool minimum) {
        const double sgn = minimum ? 1.0 : -1.0;
        // near-extremal set at t = 0 (value ties within the FD noise floor)
        double best0 = 1e300;
        for (double v : path.h_moved[0]) best0 = std::min(best0, sgn * v);
        const double tol_v = 1e-9;
        std::vector<std::pair<double, double>> set0;  // (r, theta)
        for (size_t id = 0; id < path.h_moved[0].size(); ++id)
            if (sgn * path.h_moved[0][id] <= best0 + tol_v)
                set0.emplace_back(path.r_moved[0][id], path.th_moved[0][id]);
        double worst = 0;
        for (int it = 1; it < n_t; ++it) {
            double best = 1e300;
            int bid = 0;
            for (size_t id = 0; id < path.h_moved[it].size(); ++id) {
                double v = sgn * path.h_moved[it][id];
                if (v < best) {
                    best = v;
                    bid = (int)id;
                }
            }
            double rr = path.r_moved[it][bid];
            double tt = path.th_moved[it][bid];
            double d = 1e300;
            for (const auto& [r0, t0] : set0)
                d = std::min(d, disc_distance(g.disc, rr, tt, r0, t0));
            worst = std::max(worst, d);
        }
        return worst;
    };
    rep.drift_min = drift_of(true);
    rep.drift_max = drift_of(false);

    // H_t(q*) through the generic evaluation chain must equal G(q*)
    auto value_dev = [&](const Extremum& e) {
        if (e.kind == Extremum::boundary) return 0.0;
        double worst = 0;
        for (int it = 1; it < n_t; ++it) {
            double t = path.t_nodes[it];
            ExactDiscMap phi = map_from_gen(G.scaled(t));
            // phi_t and nu_t fix critical points of G; evaluate the chain
            double R = phi.R(e.r, e.theta);
            double Hq = G.value(R, e.theta) /* = G o nu_t at the fixed point */;
            worst = std::max(worst, std::abs(Hq - e.value));
        }
        return worst;
    };
    rep.value_dev_min = value_dev(emin);
    rep.value_dev_max = value_dev(emax);
    return rep;
}

double path_grid_spacing(const DiscGrid& grid) {
    double worst = 0;
    for (int i = 0; i + 1 < grid.n_rho(); ++i)
        worst = std::max(worst, grid.rho[i + 1] - grid.rho[i]);
    for (int i = 0; i < grid.n_rho(); ++i) {
        double wrad = std::abs(grid.disc.w_of_collar(grid.rho[i], 0.0));
        worst = std::max(worst, wrad * kTwoPi / grid.n_theta);
    }
    return worst;
}

double calabi(const ExactDiscMap& phi, const DiscGrid& grid) {
    std::vector<double> s(grid.n_rho() * grid.n_theta);
    for (int i = 0; i < grid.n_rho(); ++i)
        for (int j = 0; j < grid.n_theta; ++j)
            s[grid.idx(i, j)] = phi.sigma(grid.rho[i], grid.theta(j));
    return 0.5 * grid.integral_dlambda(s);
}

CalabiValues calabi_both(const ExactDiscMap& phi, const HamiltonianPath& path) {
    CalabiValues out;
    out.from_sigma = calabi(phi, *path.grid);
    // int_0^1 int_N H_t dlambda dt; phi_t preserves dlambda so the moved
    // sample integrates H_t directly.  Composite Simpson in t.
    int n_t = (int)path.t_nodes.size();
    std::vector<double> slice(n_t);
    for (int it = 0; it < n_t; ++it) slice[it] = path.grid->integral_dlambda(path.h_moved[it]);
    double h = 1.0 / (n_t - 1);
    double s = slice[0] + slice[n_t - 1];
    for (int it = 1; it < n_t - 1; ++it) s += (it % 2 ? 4.0 : 2.0) * slice[it];
    out.from_h = s * h / 3.0;
    out.difference = std::abs(out.from_sigma - out.from_h);
    return out;
}

WitnessPoint sign_witness(const VFunction& G, const ExactDiscMap& phi, const DiscGrid& grid,
                          double cal) {
    // sup distance from the identity
    double dist = 0;
    for (int i = 0; i < grid.n_rho(); ++i)
        for (int j = 0; j < grid.n_theta; ++j) {
            double r = grid.rho[i], th = grid.theta(j);
            dist = std::max(dist, std::hypot(phi.R(r, th) - r, r * phi.Dtheta(r, th)));
        }
    if (dist < 1e-6) throw WitnessNotFound("sign_witness: map is the identity");

    bool minimum = (cal <= 0.0);
    Extremum e = locate_extremum(G, minimum);
    if (e.kind == Extremum::boundary)
        throw WitnessNotFound("sign_witness: extremiser sits on the boundary");
    double want = minimum ? -1.0 : 1.0;
    if (want * e.value <= 0.0)
        throw WitnessNotFound("sign_witness: extremal value has the wrong sign");

    WitnessPoint w;
    w.r = e.r;
    w.theta = e.theta;
    w.g_value = e.value;
    w.sigma_value = phi.sigma(e.r, e.theta);
    if (e.kind == Extremum::center) {
        w.fix_residual = std::abs(phi.R(grid.disc.a_max, 0.0) - grid.disc.a_max);
    } else {
        w.fix_residual =
            std::hypot(phi.R(e.r, e.theta) - e.r, e.r * phi.Dtheta(e.r, e.theta));
    }
    if (w.fix_residual > 1e-7)
        throw WitnessNotFound("sign_witness: extremiser is not a fixed point of the map");
    if (want * w.sigma_value <= 0.0)
        throw WitnessNotFound("sign_witness: action has the wrong sign at the witness");
    return w;
}

} // namespace reeblab
