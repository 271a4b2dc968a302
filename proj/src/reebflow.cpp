#include "reeblab/reebflow.hpp"

#include <algorithm>
#include <cmath>

#include "reeblab/errors.hpp"
#include "reeblab/numerics.hpp"

namespace reeblab {

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
constexpr double a21 = 1. / 5;
constexpr double a31 = 3. / 40, a32 = 9. / 40;
constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729;
constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                 a65 = -5103. / 18656;
constexpr double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784,
                 b6 = 11. / 84;
constexpr double e1 = 35. / 384 - 5179. / 57600, e3 = 500. / 1113 - 7571. / 16695,
                 e4 = 125. / 192 - 393. / 640, e5 = -2187. / 6784 + 92097. / 339200,
                 e6 = 11. / 84 - 187. / 2100, e7 = -1. / 40;

struct Stepper {
    const ContactForm& alpha;
    const IntegratorConfig& cfg;
    int lens;

    Vec4 rhs(const Vec4& y) const { return reeb_at(alpha, Point4(y, lens)); }

    // One adaptive step from (t,y) toward t_end.  Returns the step actually
    // taken; updates y, t and the step-size suggestion h.
    void step(double& t, Vec4& y, double& h, double t_end) {
        double dir = (t_end >= t) ? 1.0 : -1.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            double hs = dir * std::min({std::abs(h), cfg.max_step, std::abs(t_end - t)});
            Vec4 k1 = rhs(y);
            Vec4 k2 = rhs(y + hs * (a21 * k1));
            Vec4 k3 = rhs(y + hs * (a31 * k1 + a32 * k2));
            Vec4 k4 = rhs(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            Vec4 k5 = rhs(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            Vec4 k6 = rhs(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            Vec4 y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            Vec4 k7 = rhs(y5);
            Vec4 err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double en = 0;
            for (int i = 0; i < 4; ++i) {
                double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
                double r = err[i] / sc;
                en += r * r;
            }
            en = std::sqrt(en / 4.0);
            if (en <= 1.0 || std::abs(hs) <= 1e-14) {
                t += hs;
                y = cfg.projection ? y5.normalized() : y5;
                double fac = (en > 0) ? 0.9 * std::pow(en, -0.2) : 5.0;
                h = std::abs(hs) * std::clamp(fac, 0.2, 5.0);
                return;
            }
            h = std::abs(hs) * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
            if (h < 1e-14)
                throw StepFailure("integrate: step size underflow (degenerate contact form?)");
        }
        throw StepFailure("integrate: step controller failed to accept a step");
    }
};

} // namespace

Point4 integrate(const ContactForm& alpha, const Point4& q, double t, const IntegratorConfig& cfg) {
    return integrate_watch(alpha, q, t, cfg, {});
}

Point4 integrate_watch(const ContactForm& alpha, const Point4& q, double t,
                       const IntegratorConfig& cfg,
                       const std::function<void(double, const Vec4&)>& visit) {
    Stepper st{alpha, cfg, q.lens_order};
    Vec4 y = q.x;
    double cur = 0.0, h = std::min(cfg.max_step, 0.01);
    while (std::abs(t - cur) > 1e-15) {
        st.step(cur, y, h, t);
        if (visit) visit(cur, y);
    }
    return Point4(y, q.lens_order);
}

namespace {

struct PageGeometry {
    int p;
    Cplx rot;  // e^{2 pi i / p}; the target page is rot * {z2 real >= 0}

    explicit PageGeometry(int lens) : p(lens), rot(std::polar(1.0, kTwoPi / lens)) {}

    double event(const Vec4& y) const { return (y.z2() * std::conj(rot)).imag(); }
    double page_re(const Vec4& y) const { return (y.z2() * std::conj(rot)).real(); }
    double event_rate(const Vec4& y, const Vec4& ydot) const {
        return (ydot.z2() * std::conj(rot)).imag();
    }
};

} // namespace

SectionCrossing section_return(const ContactForm& alpha, const Point4& q,
                               const IntegratorConfig& cfg) {
    PageGeometry page(q.lens_order);
    Stepper st{alpha, cfg, q.lens_order};
    const double t_arm = 0.1, t_max = 2.0;

    Vec4 y = q.x;
    double t = 0.0, h = std::min(cfg.max_step, 0.01);
    double t_prev = 0.0;
    Vec4 y_prev = y;
    double g_prev = page.event(y);

    while (t < t_max) {
        st.step(t, y, h, t_max);
        double g = page.event(y);
        double tm = 0.5 * (t_prev + t);
        if (tm >= t_arm && g_prev < 0.0 && g >= 0.0) {
            // locate the crossing inside [t_prev, t]
            Vec4 base = y_prev;
            double t0 = t_prev;
            auto state_at = [&](double s) {
                return integrate(alpha, Point4(base, q.lens_order), s - t0, cfg).x;
            };
            auto gfun = [&](double s) { return page.event(state_at(s)); };
            auto gdot = [&](double s) {
                Vec4 ys = state_at(s);
                return page.event_rate(ys, st.rhs(ys));
            };
            double tc = solve_bisect_newton(gfun, gdot, t_prev, t, 1e-13);
            Vec4 yc = state_at(tc);
            if (page.page_re(yc) > 0.0) {
                return SectionCrossing{tc, Point4(yc, q.lens_order), std::abs(page.event(yc))};
            }
            // crossing on the antipodal half-page: keep going
        }
        t_prev = t;
        y_prev = y;
        g_prev = g;
    }
    throw NoReturn("section_return: no page crossing before t = 2");
}

namespace {

// Global coordinate on the base page: w = sqrt(2) z1, |w| <= sqrt(2).
Vec4 page_embed(Cplx w, int lens) {
    double n2 = std::norm(w);
    double x = std::sqrt(std::max(0.0, 1.0 - 0.5 * n2));
    return Vec4::from_complex(w / std::sqrt(2.0), Cplx(x, 0.0)).normalized();
}

Cplx page_coord(const Vec4& q) { return std::sqrt(2.0) * q.z1(); }

struct DisplacementResult {
    Cplx F;
    double tau;
    Vec4 crossing;
};

std::optional<DisplacementResult> displacement(const ContactForm& alpha, Cplx w,
                                               const OrbitSearchConfig& cfg) {
    if (std::abs(w) > std::sqrt(2.0) * 0.9995) return std::nullopt;
    Point4 q(page_embed(w, alpha.lens_order), alpha.lens_order);
    try {
        SectionCrossing sc = section_return(alpha, q, cfg.integ);
        Vec4 back = phase_mul(sc.point.x, -1.0 / alpha.lens_order);  // undo one deck step
        return DisplacementResult{page_coord(back) - w, sc.tau, sc.point.x};
    } catch (const NoReturn&) {
        return std::nullopt;
    } catch (const StepFailure&) {
        return std::nullopt;
    }
}

// Boundary fiber {z2 = 0}: not reachable by event detection (the whole orbit
// lies on the page), so test the closure directly.
std::optional<PeriodicOrbit> boundary_fiber_orbit(const ContactForm& alpha,
                                                  const OrbitSearchConfig& cfg) {
    Vec4 q0{{1, 0, 0, 0}};
    Vec4 target = phase_mul(q0, 1.0 / alpha.lens_order);  // deck * q0
    IntegratorConfig ic = cfg.integ;
    Stepper st{alpha, ic, alpha.lens_order};

    // phase alignment A(t) = <x(t), target>; closure when Im A = 0, Re A ~ 1
    Vec4 y = q0;
    double t = 0, h = std::min(ic.max_step, 0.01);
    double t_prev = 0;
    Vec4 y_prev = y;
    auto imA = [&](const Vec4& x) { return herm(x, target).imag(); };
    double g_prev = imA(y);
    while (t < cfg.t_cap + 0.5) {
        st.step(t, y, h, cfg.t_cap + 0.5);
        double g = imA(y);
        if (t > 0.5 && ((g_prev < 0 && g >= 0) || (g_prev > 0 && g <= 0)) &&
            herm(y, target).real() > 0.5) {
            Vec4 base = y_prev;
            double t0 = t_prev;
            auto state_at = [&](double s) {
                return integrate(alpha, Point4(base, alpha.lens_order), s - t0, ic).x;
            };
            auto gfun = [&](double s) { return imA(state_at(s)); };
            auto gdot = [&](double s) {
                Vec4 ys = state_at(s);
                return imA(st.rhs(ys));
            };
            double tc = solve_bisect_newton(gfun, gdot, t_prev, t, 1e-13);
            Vec4 yc = state_at(tc);
            double res = (yc - target).norm();
            if (res < 1e-7 && tc <= cfg.t_cap) {
                PeriodicOrbit orb;
                orb.seed = Point4(q0, alpha.lens_order);
                orb.period = tc;
                orb.closure_residual = res;
                return orb;
            }
            return std::nullopt;
        }
        t_prev = t;
        y_prev = y;
        g_prev = g;
    }
    return std::nullopt;
}

} // namespace

int lift_winding(const ContactForm& alpha, const Point4& seed, double period,
                 const IntegratorConfig& cfg, int samples) {
    Vec4 x0 = seed.x;
    double darg = 0;
    Cplx prev = herm(x0, x0);  // = 1
    Point4 cur = seed;
    for (int i = 1; i <= samples; ++i) {
        cur = integrate(alpha, cur, period / samples, cfg);
        Cplx hcur = herm(cur.x, x0);
        if (std::abs(hcur) < 0.1)
            throw ChartEscape("lift_winding: orbit left the Darboux chart family");
        darg += std::arg(hcur / prev);
        prev = hcur;
    }
    double steps = darg / (kTwoPi / alpha.lens_order);
    return (int)std::lround(steps);
}

bool class_h_test(const ContactForm& alpha, const PeriodicOrbit& orbit,
                  const IntegratorConfig& cfg) {
    return lift_winding(alpha, orbit.seed, orbit.period, cfg) == 1;
}

OrbitSearchResult find_orbits(const ContactForm& alpha, const OrbitSearchConfig& cfg) {
    if (!(cfg.t_cap > 1.0 && cfg.t_cap < 2.0))
        throw ConfigError("find_orbits: t_cap must lie in (1,2)");
    OrbitSearchResult out;

    std::vector<Cplx> seeds;
    seeds.push_back(Cplx(0, 0));
    const double rmax = std::sqrt(2.0);
    for (int i = 0; i < cfg.seed_radii; ++i) {
        double s = rmax * (0.12 + 0.8 * (i + 0.5) / cfg.seed_radii);
        for (int j = 0; j < cfg.seed_angles; ++j) {
            double ang = kTwoPi * (j + 0.37) / cfg.seed_angles;
            seeds.push_back(std::polar(s, ang));
        }
    }

    std::vector<PeriodicOrbit> found;
    auto push_orbit = [&](PeriodicOrbit orb) {
        for (const auto& f : found) {
            if ((f.seed.x - orb.seed.x).norm() < cfg.dedup_tol &&
                std::abs(f.period - orb.period) < 1e-6)
                return;
        }
        found.push_back(std::move(orb));
    };

    for (Cplx w : seeds) {
        ++out.seeds_tried;
        bool converged = false;
        double tau = 0;
        double jnorm = 0;
        double best = std::numeric_limits<double>::infinity();
        int stale = 0;
        for (int it = 0; it < cfg.max_newton_iter; ++it) {
            auto d0 = displacement(alpha, w, cfg);
            if (!d0) break;
            tau = d0->tau;
            if (std::abs(d0->F) < cfg.newton_tol && tau <= cfg.t_cap) {
                converged = true;
                break;
            }
            if (std::abs(d0->F) < 0.7 * best) {
                best = std::abs(d0->F);
                stale = 0;
            } else if (++stale >= 4) {
                break;  // stagnating seed (no nearby fixed point)
            }
            const double h = cfg.fd_step;
            auto dx = displacement(alpha, w + h, cfg);
            auto dy = displacement(alpha, w + Cplx(0, h), cfg);
            if (!dx || !dy) break;
            // 2x2 real Newton on F(w)
            double j11 = (dx->F.real() - d0->F.real()) / h, j12 = (dy->F.real() - d0->F.real()) / h;
            double j21 = (dx->F.imag() - d0->F.imag()) / h, j22 = (dy->F.imag() - d0->F.imag()) / h;
            double det = j11 * j22 - j12 * j21;
            jnorm = std::sqrt(j11 * j11 + j12 * j12 + j21 * j21 + j22 * j22);
            if (std::abs(det) < 1e-18) break;
            double sx = (j22 * d0->F.real() - j12 * d0->F.imag()) / det;
            double sy = (-j21 * d0->F.real() + j11 * d0->F.imag()) / det;
            double sl = std::hypot(sx, sy);
            if (sl > 0.3) {
                sx *= 0.3 / sl;
                sy *= 0.3 / sl;
            }
            w -= Cplx(sx, sy);
            if (std::abs(w) > rmax * 0.999) break;
        }
        if (!converged) {
            ++out.seeds_dropped;
            continue;
        }
        PeriodicOrbit orb;
        orb.seed = Point4(page_embed(w, alpha.lens_order), alpha.lens_order);
        orb.period = tau;
        Vec4 target = phase_mul(orb.seed.x, 1.0 / alpha.lens_order);
        Vec4 end = integrate(alpha, orb.seed, tau, cfg.integ).x;
        orb.closure_residual = (end - target).norm();
        orb.return_derivative = jnorm;
        push_orbit(std::move(orb));
    }

    if (auto bo = boundary_fiber_orbit(alpha, cfg)) push_orbit(std::move(*bo));

    for (auto& orb : found) {
        try {
            orb.lift_winding = lift_winding(alpha, orb.seed, orb.period, cfg.integ);
        } catch (const ChartEscape&) {
            orb.lift_winding = 0;
        }
        orb.class_h = (orb.lift_winding == 1);
    }

    std::sort(found.begin(), found.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.period != b.period) return a.period < b.period;
        return a.seed.x[0] < b.seed.x[0];
    });
    out.orbits = std::move(found);
    return out;
}

std::pair<double, double> t_min_max(const std::vector<PeriodicOrbit>& orbits) {
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0;
    for (const auto& o : orbits) {
        if (!o.class_h) continue;
        tmin = std::min(tmin, o.period);
        tmax = std::max(tmax, o.period);
    }
    if (!(tmax > 0)) throw EmptyOrbitSet("t_min_max: no class-h orbits");
    return {tmin, tmax};
}

} // namespace reeblab
