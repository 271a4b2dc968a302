#include "reeblab/section.hpp"

#include <algorithm>
#include <cmath>

#include "reeblab/errors.hpp"
#include "reeblab/numerics.hpp"

namespace reeblab {

namespace {

double wrap_half(double x) {
    // wrap to (-1/2, 1/2]
    x = std::fmod(x, 1.0);
    if (x > 0.5) x -= 1.0;
    if (x <= -0.5) x += 1.0;
    return x;
}

// Lagrange quadratic extrapolation to x = 0 from three samples.
double extrapolate0(double x1, double y1, double x2, double y2, double x3, double y3) {
    double l1 = (x2 * x3) / ((x1 - x2) * (x1 - x3));
    double l2 = (x1 * x3) / ((x2 - x1) * (x2 - x3));
    double l3 = (x1 * x2) / ((x3 - x1) * (x3 - x2));
    return l1 * y1 + l2 * y2 + l3 * y3;
}

void check_normalized(const ContactForm& alpha, const IntegratorConfig& cfg) {
    Point4 z_star(Vec4{{1, 0, 0, 0}}, alpha.lens_order);
    Vec4 end = integrate(alpha, z_star, 1.0, cfg).x;
    Vec4 target = phase_mul(z_star.x, 1.0 / alpha.lens_order);
    double res = (end - target).norm();
    if (res > 1e-8)
        throw NotNormalized("reference fiber closure residual " + std::to_string(res));
}

} // namespace

NormalizedForm normalize(const ContactForm& alpha, const PeriodicOrbit& gamma,
                         const IntegratorConfig& cfg, bool require_circular) {
    const int M = 48;
    const double T = gamma.period;
    Vec4 v = gamma.seed.x;

    // deviation of the orbit from the uniformly rotated fiber through gamma(0)
    double align = 0;
    Point4 cur = gamma.seed;
    for (int j = 1; j <= M; ++j) {
        cur = integrate(alpha, cur, T / M, cfg);
        Vec4 model = phase_mul(v, double(j) / M / alpha.lens_order);
        align = std::max(align, (cur.x - model).norm());
    }

    bool circular = align < 1e-8;
    if (require_circular && !circular)
        throw AlignmentFailure("normalize: orbit is not an ambient-unitary circle, residual " +
                               std::to_string(align));

    Mat4 U = Mat4::su2(v.z1(), v.z2());  // U e1 = gamma(0)
    NormalizedForm out;
    out.form = rescaled_pullback(alpha, U, T);
    out.form.lens_order = alpha.lens_order;
    out.T_ref = T;
    out.circular = circular;
    out.align_residual = align;

    // post-conditions on the normalised form
    Point4 z_star(Vec4{{1, 0, 0, 0}}, alpha.lens_order);
    Point4 p = z_star;
    double param = 0;
    for (int j = 1; j <= 8; ++j) {
        p = integrate(out.form, p, 1.0 / 8, cfg);
        Vec4 model = phase_mul(z_star.x, double(j) / 8 / alpha.lens_order);
        param = std::max(param, (p.x - model).norm());
    }
    Vec4 end = integrate(out.form, z_star, 1.0, cfg).x;
    out.fiber_closure = (end - phase_mul(z_star.x, 1.0 / alpha.lens_order)).norm();
    out.fiber_param = param;
    return out;
}

LambdaGrid pull_lambda(const ContactForm& alpha, int n_r, int n_theta,
                       const IntegratorConfig& cfg) {
    if (alpha.lens_order != 1)
        throw ConfigError("pull_lambda: the section embedding is built for p = 1");
    check_normalized(alpha, cfg);
    SectionEmbedding S;
    LambdaGrid g;
    g.n_theta = n_theta;
    Quadrature qr = gauss_legendre(n_r, 0.0, S.disc.a_max);
    g.r_nodes = qr.nodes;
    g.lam_r.resize(n_r * n_theta);
    g.lam_th.resize(n_r * n_theta);
    g.density.resize(n_r * n_theta);
    for (int i = 0; i < n_r; ++i) {
        for (int j = 0; j < n_theta; ++j) {
            double r = qr.nodes[i], th = double(j) / n_theta;
            auto [sr, sth] = S.embed_tangent(r, th);
            Vec4 q = S.embed(r, th);
            g.lam_r[i * n_theta + j] = alpha.eval(q, sr);
            g.lam_th[i * n_theta + j] = alpha.eval(q, sth);
            g.density[i * n_theta + j] = alpha.d_eval(q, sr, sth);
        }
    }
    double dev = 0;
    for (int j = 0; j < n_theta; ++j) {
        double th = double(j) / n_theta;
        auto [sr, sth] = S.embed_tangent(0.0, th);
        Vec4 q = S.embed(0.0, th);
        dev = std::max(dev, std::abs(alpha.eval(q, sth) + double(S.disc.t_sigma)));
        (void)sr;
    }
    g.boundary_deviation = dev;
    return g;
}

ReturnData return_map(const ContactForm& alpha, const ReturnGridConfig& cfg) {
    if (alpha.lens_order != 1)
        throw ConfigError("return_map: the section embedding is built for p = 1");
    check_normalized(alpha, cfg.integ);

    ReturnData rd;
    rd.disc = DiscModel(1);
    rd.cfg = cfg;
    SectionEmbedding S;
    const double a = rd.disc.a_max;
    const double r_split = cfg.collar_split * a;
    rd.w_cap = std::sqrt(a * a - r_split * r_split);

    Quadrature qr = gauss_legendre(cfg.n_r, 0.0, r_split);
    rd.r_nodes = qr.nodes;
    rd.r_wts = qr.weights;
    int nc = cfg.n_r * cfg.n_theta;
    rd.tau_c.resize(nc);
    rd.pw_c.resize(nc);
    rd.lam_r.resize(nc);
    rd.lam_th.resize(nc);
    rd.f_c.resize(nc);
    rd.lam_image_r.resize(nc);
    rd.lam_image_th.resize(nc);

    for (int i = 0; i < cfg.n_r; ++i) {
        for (int j = 0; j < cfg.n_theta; ++j) {
            double r = qr.nodes[i], th = double(j) / cfg.n_theta;
            Vec4 q = S.embed(r, th);
            auto [sr, sth] = S.embed_tangent(r, th);
            int idx = rd.collar_index(i, j);
            rd.lam_r[idx] = alpha.eval(q, sr);
            rd.lam_th[idx] = alpha.eval(q, sth);
            rd.f_c[idx] = alpha.d_eval(q, sr, sth);
            SectionCrossing sc = section_return(alpha, Point4(q, 1), cfg.integ);
            rd.tau_c[idx] = sc.tau;
            rd.pw_c[idx] = S.w_of_point(sc.point.x);
            auto [r2, t2] = rd.disc.collar_of_w(rd.pw_c[idx]);
            Vec4 q2 = S.embed(r2, t2);
            auto [sr2, sth2] = S.embed_tangent(r2, t2);
            rd.lam_image_r[idx] = alpha.eval(q2, sr2);
            rd.lam_image_th[idx] = alpha.eval(q2, sth2);
        }
    }

    Quadrature qs = gauss_legendre(cfg.n_s, 0.0, rd.w_cap);
    rd.s_nodes = qs.nodes;
    rd.s_wts = qs.weights;
    int nk = cfg.n_s * cfg.n_phi;
    rd.tau_k.resize(nk);
    rd.pw_k.resize(nk);
    rd.g_k.resize(nk);
    for (int i = 0; i < cfg.n_s; ++i) {
        for (int j = 0; j < cfg.n_phi; ++j) {
            Cplx w = std::polar(qs.nodes[i], kTwoPi * j / cfg.n_phi);
            Vec4 q = S.embed_w(w);
            auto [d1, d2] = S.embed_w_tangent(w);
            int idx = rd.cap_index(i, j);
            rd.g_k[idx] = alpha.d_eval(q, d1, d2);
            SectionCrossing sc = section_return(alpha, Point4(q, 1), cfg.integ);
            rd.tau_k[idx] = sc.tau;
            rd.pw_k[idx] = S.w_of_point(sc.point.x);
        }
    }

    // boundary ring by quadratic one-sided extrapolation in r (the flow
    // formulas degenerate at r = 0 even though the data extends smoothly)
    rd.tau_bdry.resize(cfg.n_theta);
    rd.dtheta_bdry.resize(cfg.n_theta);
    for (int j = 0; j < cfg.n_theta; ++j) {
        double th = double(j) / cfg.n_theta;
        double x1 = qr.nodes[0], x2 = qr.nodes[1], x3 = qr.nodes[2];
        auto dth_at = [&](int i) {
            auto [rp, tp] = rd.disc.collar_of_w(rd.pw_c[rd.collar_index(i, j)]);
            (void)rp;
            return wrap_half(tp - th);
        };
        rd.tau_bdry[j] = extrapolate0(x1, rd.tau_c[rd.collar_index(0, j)], x2,
                                      rd.tau_c[rd.collar_index(1, j)], x3,
                                      rd.tau_c[rd.collar_index(2, j)]);
        rd.dtheta_bdry[j] = extrapolate0(x1, dth_at(0), x2, dth_at(1), x3, dth_at(2));
    }
    rd.T_ref = 1.0;
    return rd;
}

double ReturnData::integral_dlambda(const std::vector<double>& collar_field,
                                    const std::vector<double>& cap_field) const {
    double s = 0;
    for (int i = 0; i < cfg.n_r; ++i)
        for (int j = 0; j < cfg.n_theta; ++j) {
            int idx = collar_index(i, j);
            s += collar_field[idx] * f_c[idx] * r_wts[i] / cfg.n_theta;
        }
    for (int i = 0; i < cfg.n_s; ++i)
        for (int j = 0; j < cfg.n_phi; ++j) {
            int idx = cap_index(i, j);
            s += cap_field[idx] * g_k[idx] * s_nodes[i] * s_wts[i] * kTwoPi / cfg.n_phi;
        }
    return s;
}

double ReturnData::integral_tau_dlambda() const { return integral_dlambda(tau_c, tau_k); }

double ReturnData::integral_sigma_dlambda() const {
    std::vector<double> sc(tau_c.size()), sk(tau_k.size());
    for (size_t i = 0; i < tau_c.size(); ++i) sc[i] = tau_c[i] - 1.0;
    for (size_t i = 0; i < tau_k.size(); ++i) sk[i] = tau_k[i] - 1.0;
    return integral_dlambda(sc, sk);
}

double ReturnData::boundary_rotation() const {
    double s = 0;
    for (double d : dtheta_bdry) s += d;
    return s / dtheta_bdry.size();
}

CalabiReport action_and_calabi(const ReturnData& rd, double vol_normalized) {
    CalabiReport rep;
    rep.int_sigma_dlambda = rd.integral_sigma_dlambda();
    rep.cal_normalized = 0.5 * rep.int_sigma_dlambda;
    rep.cal = rd.T_ref * rd.T_ref * rep.cal_normalized;
    rep.vol_from_tau = rd.integral_tau_dlambda();
    double t_sigma = rd.disc.t_sigma;
    rep.identity_residual =
        std::abs(vol_normalized - (2.0 * rep.cal_normalized + t_sigma)) / vol_normalized;
    return rep;
}

namespace {

// section displacement in w for the fixed-point Newton (p = 1)
struct PageNewton {
    const ContactForm& alpha;
    const IntegratorConfig& cfg;
    SectionEmbedding S;

    std::pair<Cplx, double> F(Cplx w) const {
        if (std::abs(w) > std::sqrt(2.0) * 0.9995)
            throw NoReturn("fixed-point step left the page");
        SectionCrossing sc = section_return(alpha, Point4(S.embed_w(w), 1), cfg);
        return {S.w_of_point(sc.point.x) - w, sc.tau};
    }

    bool polish(Cplx& w, double& tau, double tol, int iters = 20) const {
        const double h = 1e-6;
        try {
            for (int it = 0; it < iters; ++it) {
                auto [f0, t0] = F(w);
                tau = t0;
                if (std::abs(f0) < tol) return true;
                auto [fx, tx] = F(w + h);
                auto [fy, ty] = F(w + Cplx(0, h));
                (void)tx;
                (void)ty;
                double j11 = (fx.real() - f0.real()) / h, j12 = (fy.real() - f0.real()) / h;
                double j21 = (fx.imag() - f0.imag()) / h, j22 = (fy.imag() - f0.imag()) / h;
                double det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-18) return false;
                Cplx step((j22 * f0.real() - j12 * f0.imag()) / det,
                          (-j21 * f0.real() + j11 * f0.imag()) / det);
                if (std::abs(step) > 0.2) step *= 0.2 / std::abs(step);
                w -= step;
            }
        } catch (const NoReturn&) {
            return false;
        } catch (const StepFailure&) {
            return false;
        }
        return false;
    }
};

} // namespace

std::vector<FixedPointRecord> fixed_point_orbit_check(const ReturnData& rd,
                                                      const ContactForm& alpha,
                                                      double scan_threshold) {
    PageNewton pn{alpha, rd.cfg.integ, SectionEmbedding{}};
    std::vector<FixedPointRecord> out;
    std::vector<std::pair<double, Cplx>> candidates;  // (displacement, node)

    auto scan = [&](const std::vector<Cplx>& pw, auto w_of_node, int n_major, int n_minor) {
        for (int i = 0; i < n_major; ++i)
            for (int j = 0; j < n_minor; ++j) {
                int idx = i * n_minor + j;
                Cplx w = w_of_node(i, j);
                double disp = std::abs(pw[idx] - w);
                if (disp < scan_threshold && std::abs(w) < rd.disc.a_max * 0.98)
                    candidates.emplace_back(disp, w);
            }
    };
    scan(rd.pw_c, [&](int i, int j) {
        return rd.disc.w_of_collar(rd.r_nodes[i], double(j) / rd.cfg.n_theta);
    }, rd.cfg.n_r, rd.cfg.n_theta);
    scan(rd.pw_k, [&](int i, int j) {
        return std::polar(rd.s_nodes[i], kTwoPi * j / rd.cfg.n_phi);
    }, rd.cfg.n_s, rd.cfg.n_phi);

    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (auto& [disp, w0] : candidates) {
        Cplx w = w0;
        bool near_found = false;
        for (const auto& r : out)
            if (std::abs(r.w - w) < 0.05) near_found = true;
        if (near_found) continue;
        double tau = 0;
        if (!pn.polish(w, tau, 1e-9)) continue;
        bool dup = false;
        for (const auto& r : out)
            if (std::abs(r.w - w) < 1e-5) dup = true;
        if (dup) continue;

        FixedPointRecord rec;
        rec.w = w;
        rec.tau = tau;
        rec.sigma = tau - 1.0;
        Vec4 q = pn.S.embed_w(w);
        Vec4 end = integrate(alpha, Point4(q, 1), tau, rd.cfg.integ).x;
        rec.closure_residual = (end - q).norm();

        // independent closure time: stationary point of |Phi_t(q) - q|
        auto dist2dot = [&](double t) {
            Point4 p = integrate(alpha, Point4(q, 1), t, rd.cfg.integ);
            Vec4 R = reeb_at(alpha, p);
            return (p.x - q).dot(R);
        };
        double t_closed = tau;
        {
            double lo = tau - 0.02, hi = tau + 0.02;
            double flo = dist2dot(lo), fhi = dist2dot(hi);
            if (flo < 0 && fhi > 0) {
                auto g = [&](double t) { return dist2dot(t); };
                auto gp = [&](double t) {
                    return (dist2dot(t + 1e-6) - dist2dot(t - 1e-6)) / 2e-6;
                };
                t_closed = solve_bisect_newton(g, gp, lo, hi, 1e-12);
            }
        }
        rec.period_residual = std::abs(t_closed - (1.0 + rec.sigma));
        out.push_back(rec);
    }
    std::sort(out.begin(), out.end(), [](const FixedPointRecord& a, const FixedPointRecord& b) {
        if (a.w.real() != b.w.real()) return a.w.real() < b.w.real();
        return a.w.imag() < b.w.imag();
    });
    return out;
}

double exactness_nodal_residual(const ReturnData& rd) {
    // dtau and dP by barycentric differentiation in r and DFT in theta on the
    // collar patch; P^* lambda from analytic lambda at the return points.
    const int nr = rd.cfg.n_r, nt = rd.cfg.n_theta;
    auto D = differentiation_matrix(rd.r_nodes);

    // collar fields of the return map, unwrapped
    std::vector<double> rp(nr * nt), dtp(nr * nt);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            auto [r2, t2] = rd.disc.collar_of_w(rd.pw_c[rd.collar_index(i, j)]);
            rp[rd.collar_index(i, j)] = r2;
            dtp[rd.collar_index(i, j)] = wrap_half(t2 - double(j) / nt);
        }

    auto ddr = [&](const std::vector<double>& f, int i, int j) {
        double s = 0;
        for (int k = 0; k < nr; ++k) s += D[i][k] * f[k * nt + j];
        return s;
    };
    std::vector<double> col(nt);
    auto ddth_row = [&](const std::vector<double>& f, int i) {
        for (int j = 0; j < nt; ++j) col[j] = f[i * nt + j];
        return fourier_derivative(col);
    };

    double worst = 0;
    for (int i = 0; i < nr; ++i) {
        auto dtau_th = ddth_row(rd.tau_c, i);
        auto drp_th = ddth_row(rp, i);
        auto ddtp_th = ddth_row(dtp, i);
        for (int j = 0; j < nt; ++j) {
            int idx = rd.collar_index(i, j);
            double drdr = ddr(rp, i, j);
            double drdth = drp_th[j];
            double dthdr = ddr(dtp, i, j);
            double dthdth = 1.0 + ddtp_th[j];
            double dtaudr = ddr(rd.tau_c, i, j);
            double dtaudth = dtau_th[j];
            // (P^* lambda)_r = lam_r(P) dr'/dr + lam_th(P) dth'/dr, etc.
            double lam_r2 = rd.lam_image_r[idx];
            double lam_th2 = rd.lam_image_th[idx];
            double res_r = lam_r2 * drdr + lam_th2 * dthdr - rd.lam_r[idx] - dtaudr;
            double res_th = lam_r2 * drdth + lam_th2 * dthdth - rd.lam_th[idx] - dtaudth;
            worst = std::max({worst, std::abs(res_r), std::abs(res_th)});
        }
    }
    return worst;
}

double boundary_identity_residual(const ReturnData& rd) {
    double worst = 0;
    for (int j = 0; j < rd.cfg.n_theta; ++j) {
        // int_q^{P q} lambda_* along the boundary, short path: -t_sigma * dtheta
        double integral = -double(rd.disc.t_sigma) * rd.dtheta_bdry[j];
        worst = std::max(worst, std::abs(rd.tau_bdry[j] - 1.0 - integral));
    }
    return worst;
}

double loop_exactness_residual(const ContactForm& alpha, int n_loops, uint64_t seed,
                               const IntegratorConfig& cfg, int cheb_nodes) {
    SectionEmbedding S;
    SplitMix64 rng(seed);
    const double a = S.disc.a_max;
    auto cheb = chebyshev_lobatto(cheb_nodes, 0.0, 1.0);
    auto D = differentiation_matrix(cheb);
    auto wts = clenshaw_curtis_weights(cheb_nodes, 0.0, 1.0);

    double worst = 0;
    for (int l = 0; l < n_loops; ++l) {
        double r0 = rng.uniform(0.08 * a, 0.5 * a);
        double r1 = rng.uniform(r0 + 0.05 * a, 0.8 * a);
        double th0 = rng.uniform(0.0, 1.0);
        double dth = rng.uniform(0.1, 0.35);
        // rectangle (r0,r1) x (th0, th0+dth), traversed once
        std::vector<std::function<std::pair<double, double>(double)>> sides = {
            [&](double s) { return std::make_pair(r0 + (r1 - r0) * s, th0); },
            [&](double s) { return std::make_pair(r1, th0 + dth * s); },
            [&](double s) { return std::make_pair(r1 - (r1 - r0) * s, th0 + dth); },
            [&](double s) { return std::make_pair(r0, th0 + dth * (1 - s)); },
        };
        double src_int = 0, img_int = 0;
        for (auto& side : sides) {
            std::vector<Vec4> ys(cheb_nodes), imgs(cheb_nodes);
            for (int m = 0; m < cheb_nodes; ++m) {
                auto [r, th] = side(cheb[m]);
                Vec4 q = S.embed(r, th);
                ys[m] = q;
                imgs[m] = section_return(alpha, Point4(q, 1), cfg).point.x;
            }
            // spectral tangent of both curves, then int alpha(ydot) ds
            for (int m = 0; m < cheb_nodes; ++m) {
                Vec4 dy{{0, 0, 0, 0}}, dim{{0, 0, 0, 0}};
                for (int k = 0; k < cheb_nodes; ++k) {
                    dy += D[m][k] * ys[k];
                    dim += D[m][k] * imgs[k];
                }
                src_int += wts[m] * alpha.eval(ys[m], dy);
                img_int += wts[m] * alpha.eval(imgs[m], dim);
            }
        }
        worst = std::max(worst, std::abs(img_int - src_int));
    }
    return worst;
}

std::pair<double, double> zoll_return_deviation(const ReturnData& rd) {
    double dp = 0, dt = 0;
    for (int i = 0; i < rd.cfg.n_r; ++i)
        for (int j = 0; j < rd.cfg.n_theta; ++j) {
            int idx = rd.collar_index(i, j);
            Cplx w = rd.disc.w_of_collar(rd.r_nodes[i], double(j) / rd.cfg.n_theta);
            dp = std::max(dp, std::abs(rd.pw_c[idx] - w));
            dt = std::max(dt, std::abs(rd.tau_c[idx] - 1.0));
        }
    for (int i = 0; i < rd.cfg.n_s; ++i)
        for (int j = 0; j < rd.cfg.n_phi; ++j) {
            int idx = rd.cap_index(i, j);
            Cplx w = std::polar(rd.s_nodes[i], kTwoPi * j / rd.cfg.n_phi);
            dp = std::max(dp, std::abs(rd.pw_k[idx] - w));
            dt = std::max(dt, std::abs(rd.tau_k[idx] - 1.0));
        }
    return {dp, dt};
}

} // namespace reeblab
