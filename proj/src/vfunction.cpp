#include "reeblab/vfunction.hpp"

#include <algorithm>
#include <cmath>

#include "reeblab/errors.hpp"

namespace reeblab {

DiscGrid::DiscGrid(const DiscModel& d, int n_rho, int n_th) : disc(d), n_theta(n_th) {
    rho = chebyshev_lobatto(n_rho, 0.0, d.a_max);
    rho_bw = barycentric_weights(rho);
    d_rho = differentiation_matrix(rho);
    cc = clenshaw_curtis_weights(n_rho, 0.0, d.a_max);
}

double DiscGrid::integral_dlambda(const std::vector<double>& f) const {
    double s = 0;
    for (int i = 0; i < n_rho(); ++i) {
        double row = 0;
        for (int j = 0; j < n_theta; ++j) row += f[idx(i, j)];
        s += cc[i] * rho[i] * row / n_theta;
    }
    return s;
}

double NodalField::eval_line(double rho, int j) const {
    std::vector<double> col(grid->n_rho());
    for (int i = 0; i < grid->n_rho(); ++i) col[i] = at(i, j);
    return barycentric_eval(grid->rho, grid->rho_bw, col, rho);
}

double NodalField::eval(double rho, double theta) const {
    std::vector<double> col(grid->n_rho());
    std::vector<double> row(grid->n_theta);
    for (int i = 0; i < grid->n_rho(); ++i) {
        for (int j = 0; j < grid->n_theta; ++j) row[j] = at(i, j);
        col[i] = fourier_eval(row, theta);
    }
    return barycentric_eval(grid->rho, grid->rho_bw, col, rho);
}

NodalField NodalField::d_drho() const {
    NodalField out(*grid);
    for (int j = 0; j < grid->n_theta; ++j)
        for (int i = 0; i < grid->n_rho(); ++i) {
            double s = 0;
            for (int k = 0; k < grid->n_rho(); ++k) s += grid->d_rho[i][k] * at(k, j);
            out.at(i, j) = s;
        }
    return out;
}

NodalField NodalField::d_dtheta() const {
    NodalField out(*grid);
    std::vector<double> row(grid->n_theta);
    for (int i = 0; i < grid->n_rho(); ++i) {
        for (int j = 0; j < grid->n_theta; ++j) row[j] = at(i, j);
        auto dr = fourier_derivative(row);
        for (int j = 0; j < grid->n_theta; ++j) out.at(i, j) = dr[j];
    }
    return out;
}

namespace {
// s(t) = exp(-1/t) for t > 0 with first two derivatives; 0 for t <= 0.
struct ExpBump {
    double s = 0, s1 = 0, s2 = 0;
    explicit ExpBump(double t) {
        if (t <= 1e-12) return;
        s = std::exp(-1.0 / t);
        s1 = s / (t * t);
        s2 = s * (1.0 / (t * t * t * t) - 2.0 / (t * t * t));
    }
};
} // namespace

double Plateau::value(double r) const {
    if (r <= r1) return 1.0;
    if (r >= r2) return 0.0;
    double t = (r2 - r) / (r2 - r1);
    ExpBump a(t), b(1 - t);
    return a.s / (a.s + b.s);
}

double Plateau::d1(double r) const {
    if (r <= r1 || r >= r2) return 0.0;
    double t = (r2 - r) / (r2 - r1);
    double dt = -1.0 / (r2 - r1);
    ExpBump a(t), b(1 - t);
    double den = a.s + b.s;
    // S = a/(a+b), b' = -s'(1-t) in t
    double dS = (a.s1 * b.s + a.s * b.s1) / (den * den);
    return dS * dt;
}

double Plateau::d2(double r) const {
    if (r <= r1 || r >= r2) return 0.0;
    double t = (r2 - r) / (r2 - r1);
    double dt = -1.0 / (r2 - r1);
    ExpBump a(t), b(1 - t);
    double den = a.s + b.s;
    double num = a.s1 * b.s + a.s * b.s1;
    double dnum = a.s2 * b.s - a.s * b.s2;   // d/dt (a' b + a b'), cross terms cancel
    double dden = a.s1 - b.s1;
    double d2S = (dnum * den - 2.0 * num * dden) / (den * den * den);
    return d2S * dt * dt;
}

VFunction::VFunction(DiscModel disc, std::vector<Term> terms)
    : disc_(disc), terms_(std::move(terms)) {
    plateau_ = Plateau{0.5 * disc_.a_max, 0.85 * disc_.a_max};
}

VFunction::Jet VFunction::jet(double r, double theta) const {
    Jet J;
    const double v = r * r;
    for (const Term& t : terms_) {
        // core(v) with first and second v-derivatives (Horner)
        double c = 0, cv = 0, cvv = 0;
        for (int p = (int)t.core.size() - 1; p >= 0; --p) {
            cvv = cvv * v + 2 * cv;
            cv = cv * v + c;
            c = c * v + t.core[p];
        }
        double p1 = 2 * r * (c + v * cv);                            // (v c)'
        double p2 = 2 * (c + v * cv) + 4 * v * (2 * cv + v * cvv);   // (v c)''
        double chi = 1, chi1 = 0, chi2 = 0;
        if (t.cut) {
            chi = plateau_.value(r);
            chi1 = plateau_.d1(r);
            chi2 = plateau_.d2(r);
        }
        double prof = v * c;
        double A = prof * chi;
        double A1 = p1 * chi + prof * chi1;
        double A2 = p2 * chi + 2 * p1 * chi1 + prof * chi2;
        // division-free hat pieces (prof / r = r c, prof / r^2 = c)
        double hr = 2 * (c + v * cv) * chi + r * c * chi1;           // A1 / r
        double ht = c * chi;                                         // A / r^2
        double hr_r = 4 * r * (2 * cv + v * cvv) * chi + 2 * (c + v * cv) * chi1 +
                      c * chi1 + 2 * v * cv * chi1 + r * c * chi2;
        double ht_r = 2 * r * cv * chi + c * chi1;

        double ang, dang, ddang;
        if (t.m == 0) {
            ang = 1;
            dang = 0;
            ddang = 0;
        } else {
            double w = kTwoPi * t.m;
            double cs = std::cos(w * theta), sn = std::sin(w * theta);
            ang = t.is_sin ? sn : cs;
            dang = t.is_sin ? w * cs : -w * sn;
            ddang = -w * w * ang;
        }

        J.g += A * ang;
        J.g_r += A1 * ang;
        J.g_t += A * dang;
        J.g_rr += A2 * ang;
        J.g_rt += A1 * dang;
        J.g_tt += A * ddang;
        J.hr += hr * ang;
        J.ht += ht * dang;
        J.hr_r += hr_r * ang;
        J.hr_t += hr * dang;
        J.ht_r += ht_r * dang;
        J.ht_t += ht * ddang;
    }
    return J;
}

VFunction VFunction::scaled(double c) const {
    std::vector<Term> ts = terms_;
    for (auto& t : ts)
        for (auto& cc : t.core) cc *= c;
    return VFunction(disc_, std::move(ts));
}

double VFunction::vnorm(int n_r, int n_theta) const {
    double sup = 0;
    for (int i = 0; i <= n_r; ++i) {
        double r = disc_.a_max * i / n_r * 0.999;
        for (int j = 0; j < n_theta; ++j) {
            Jet J = jet(r, double(j) / n_theta);
            sup = std::max({sup, std::abs(J.g), std::abs(J.g_r), std::abs(J.g_t),
                            std::abs(J.g_rr), std::abs(J.g_rt), std::abs(J.g_tt)});
            double rht = r * J.ht;
            double rht_r = J.ht + r * J.ht_r;
            double rht_t = r * J.ht_t;
            sup = std::max({sup, std::abs(J.hr), std::abs(J.hr_r), std::abs(J.hr_t),
                            std::abs(rht), std::abs(rht_r), std::abs(rht_t)});
        }
    }
    return sup;
}

VFunction VFunction::random(DiscModel disc, uint64_t seed, double target_vnorm, int max_m) {
    SplitMix64 rng(seed);
    std::vector<Term> ts;
    ts.push_back(Term{0, false,
                      {rng.uniform(-1, 1), 0.5 * rng.uniform(-1, 1), 0.25 * rng.uniform(-1, 1)},
                      false});
    for (int m = 1; m <= max_m; ++m) {
        double decay = 1.0 / (m * m);
        ts.push_back(
            Term{m, false, {decay * rng.uniform(-1, 1), 0.3 * decay * rng.uniform(-1, 1)}, true});
        ts.push_back(
            Term{m, true, {decay * rng.uniform(-1, 1), 0.3 * decay * rng.uniform(-1, 1)}, true});
    }
    VFunction g(disc, std::move(ts));
    double n = g.vnorm();
    if (n <= 0) return g;
    return g.scaled(target_vnorm / n);
}

VFunction VFunction::radial(DiscModel disc, std::vector<double> core) {
    return VFunction(disc, {Term{0, false, std::move(core), false}});
}

VFunction VFunction::angular(DiscModel disc, int m, bool is_sin, std::vector<double> core) {
    return VFunction(disc, {Term{m, is_sin, std::move(core), true}});
}

NodalField hat_divide(const NodalField& f) {
    const DiscGrid& g = *f.grid;
    for (int j = 0; j < g.n_theta; ++j)
        if (std::abs(f.at(0, j)) > 1e-10)
            throw NonVanishingBoundary("hat_divide: f(0,theta) != 0");
    NodalField df = f.d_drho();
    NodalField out(g);
    Quadrature qu = gauss_legendre(16, 0.0, 1.0);
    for (int j = 0; j < g.n_theta; ++j) {
        std::vector<double> col(g.n_rho());
        for (int i = 0; i < g.n_rho(); ++i) col[i] = df.at(i, j);
        for (int i = 0; i < g.n_rho(); ++i) {
            double s = 0;
            for (int u = 0; u < 16; ++u)
                s += qu.weights[u] * barycentric_eval(g.rho, g.rho_bw, col, qu.nodes[u] * g.rho[i]);
            out.at(i, j) = s;
        }
    }
    return out;
}

NodalField hat_divide_hybrid(const NodalField& f, double delta_frac) {
    const DiscGrid& g = *f.grid;
    for (int j = 0; j < g.n_theta; ++j)
        if (std::abs(f.at(0, j)) > 1e-7)
            throw NonVanishingBoundary("hat_divide_hybrid: f(0,theta) != 0");
    const double delta = delta_frac * g.disc.a_max;
    NodalField df = f.d_drho();
    NodalField out(g);
    Quadrature qu = gauss_legendre(16, 0.0, 1.0);
    for (int j = 0; j < g.n_theta; ++j) {
        std::vector<double> col(g.n_rho()), dcol(g.n_rho());
        for (int i = 0; i < g.n_rho(); ++i) {
            col[i] = f.at(i, j);
            dcol[i] = df.at(i, j);
        }
        for (int i = 0; i < g.n_rho(); ++i) {
            double rho = g.rho[i];
            if (rho >= delta) {
                out.at(i, j) = col[i] / rho;
            } else {
                double s = 0;
                for (int u = 0; u < 16; ++u)
                    s += qu.weights[u] * barycentric_eval(g.rho, g.rho_bw, dcol, qu.nodes[u] * rho);
                out.at(i, j) = s;
            }
        }
    }
    return out;
}

RadialSplit radial_split(const NodalField& f) {
    const DiscGrid& g = *f.grid;
    RadialSplit out;
    out.f_rho = hat_divide(f.d_drho());
    out.f_theta = hat_divide(hat_divide(f.d_dtheta()));

    NodalField frr = out.f_rho.d_drho();
    NodalField frt = out.f_rho.d_dtheta();
    NodalField ftr = out.f_theta.d_drho();
    NodalField ftt = out.f_theta.d_dtheta();
    double nr = 0, nt = 0, nh = 0;
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            int id = g.idx(i, j);
            nr = std::max({nr, std::abs(out.f_rho.v[id]), std::abs(frr.v[id]),
                           std::abs(frt.v[id])});
            nt = std::max({nt, std::abs(out.f_theta.v[id]), g.rho[i] * std::abs(ftr.v[id]),
                           g.rho[i] * std::abs(ftt.v[id])});
            double rft = g.rho[i] * out.f_theta.v[id];
            double rft_r = out.f_theta.v[id] + g.rho[i] * ftr.v[id];
            double rft_t = g.rho[i] * ftt.v[id];
            nh = std::max({nh, std::abs(out.f_rho.v[id]), std::abs(frr.v[id]),
                           std::abs(frt.v[id]), std::abs(rft), std::abs(rft_r),
                           std::abs(rft_t)});
        }
    out.norm_split = nr + nt;
    out.norm_hat = nh;
    return out;
}

} // namespace reeblab
