#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/errors.hpp"
#include "reeblab/numerics.hpp"
#include "reeblab/section.hpp"

using namespace reeblab;

namespace {

ReturnGridConfig small_grid() {
    ReturnGridConfig cfg;
    cfg.n_r = 20;
    cfg.n_theta = 32;
    cfg.n_s = 12;
    cfg.n_phi = 24;
    return cfg;
}

PeriodicOrbit fiber_orbit(double period = 1.0) {
    PeriodicOrbit o;
    o.seed = Point4(Vec4{{1, 0, 0, 0}});
    o.period = period;
    o.class_h = true;
    o.lift_winding = 1;
    return o;
}

} // namespace

TEST_CASE("embedding formulas") {
    SectionEmbedding S;
    // boundary covers the reference fiber with orientation reversed
    for (double th : {0.0, 0.2, 0.85}) {
        Vec4 q = S.embed(0.0, th);
        CHECK((q - Vec4::from_complex(std::polar(1.0, -kTwoPi * th), 0.0)).norm() < 1e-15);
    }
    // the center is a single point (0, 1)
    Vec4 c1 = S.embed(std::sqrt(2.0) - 1e-14, 0.1);
    Vec4 c2 = S.embed(std::sqrt(2.0) - 1e-14, 0.7);
    CHECK((c1 - c2).norm() < 1e-6);
    CHECK(c1[2] == doctest::Approx(1.0));

    // S^* alpha_* = (-1 + r^2/2) dtheta on a grid
    ContactForm a = zoll_form(1);
    double worst = 0;
    for (int i = 1; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            double r = std::sqrt(2.0) * i / 12.0, th = j / 12.0;
            auto [sr, sth] = S.embed_tangent(r, th);
            Vec4 q = S.embed(r, th);
            worst = std::max(worst, std::abs(a.eval(q, sr)));
            worst = std::max(worst, std::abs(a.eval(q, sth) - (-1.0 + 0.5 * r * r)));
        }
    CHECK(worst < 1e-10);

    // collar <-> w chart consistency and the lambda_* overlap identity
    DiscModel disc(1);
    for (int i = 1; i < 8; ++i) {
        double r = std::sqrt(2.0) * i / 8.0;
        Cplx w = disc.w_of_collar(r, 0.3);
        auto [r2, t2] = disc.collar_of_w(w);
        CHECK(r2 == doctest::Approx(r).epsilon(1e-12));
        CHECK(t2 == doctest::Approx(0.3).epsilon(1e-12));
        CHECK((S.embed_w(w) - S.embed(r, 0.3)).norm() < 1e-12);
    }
    // lambda_* in w coordinates: (1/4pi)(w1 dw2 - w2 dw1)
    for (int i = 1; i < 6; ++i) {
        Cplx w = std::polar(0.2 * i, 0.9);
        auto [d1, d2] = S.embed_w_tangent(w);
        Vec4 q = S.embed_w(w);
        CHECK(a.eval(q, d1) == doctest::Approx(-w.imag() / (4 * kPi)).epsilon(1e-12));
        CHECK(a.eval(q, d2) == doctest::Approx(w.real() / (4 * kPi)).epsilon(1e-12));
    }
}

TEST_CASE("pull_lambda") {
    ContactForm a = zoll_form(1);
    LambdaGrid g = pull_lambda(a, 16, 24);
    // lambda = lambda_* exactly for the zoll form
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 24; ++j) {
            double r = g.r_nodes[i];
            CHECK(std::abs(g.lam_r[i * 24 + j]) < 1e-12);
            CHECK(g.lam_th[i * 24 + j] == doctest::Approx(-1.0 + 0.5 * r * r).epsilon(1e-12));
            CHECK(g.density[i * 24 + j] == doctest::Approx(r).epsilon(1e-12));
        }
    CHECK(g.boundary_deviation < 1e-12);

    // admissible perturbed forms keep the boundary restriction -t dtheta
    ContactForm b = perturbed_form(1, named_generator("resonant"), 0.05);
    LambdaGrid gb = pull_lambda(b, 16, 24);
    CHECK(gb.boundary_deviation < 1e-12);
    // dlambda / (r dr dtheta) extends continuously to r = 0
    SectionEmbedding S;
    auto dens_over_r = [&](double r) {
        auto [sr, sth] = S.embed_tangent(r, 0.37);
        return b.d_eval(S.embed(r, 0.37), sr, sth) / r;
    };
    CHECK(std::abs(dens_over_r(1e-3) - dens_over_r(1e-6)) < 1e-5);

    // a non-normalised form is rejected
    ContactForm bad = perturbed_form(1, Poly::coordinate(2), 0.05);  // moves the fiber
    CHECK_THROWS_AS(pull_lambda(bad, 8, 12), NotNormalized);
}

TEST_CASE("normalize") {
    // zoll fiber: identity up to phase
    ContactForm a = zoll_form(1);
    NormalizedForm n = normalize(a, fiber_orbit());
    CHECK(n.circular);
    CHECK(n.fiber_closure < 1e-9);
    CHECK(n.fiber_param < 1e-9);

    // scaling is removed
    ContactForm ac = scaled_form(a, 1.7);
    NormalizedForm nc = normalize(ac, fiber_orbit(1.7));
    CHECK(nc.circular);
    CHECK(nc.fiber_closure < 1e-9);
    CHECK(contact_volume(nc.form) == doctest::Approx(1.0).epsilon(1e-9));

    // radial perturbation: the short fiber has period 1 - eps/2 and the
    // normalised form is exactly normalised
    double eps = 0.05;
    ContactForm ar = perturbed_form(1, named_generator("radial"), eps);
    NormalizedForm nr = normalize(ar, fiber_orbit(1.0 - 0.5 * eps));
    CHECK(nr.circular);
    CHECK(nr.fiber_closure < 1e-9);
    CHECK(nr.fiber_param < 1e-9);

    // center fiber of the radial form: moved onto the reference fiber by the
    // coordinate-swap unitary
    PeriodicOrbit center;
    center.seed = Point4(Vec4{{0, 0, 1, 0}});
    center.period = 1.0 + 0.5 * eps;
    NormalizedForm nz = normalize(ar, center);
    CHECK(nz.circular);
    CHECK(nz.fiber_closure < 1e-9);

    // a phase-breaking perturbation produces genuinely non-circular orbits;
    // the fallback moves gamma(0) only, so the orbit through z_* still closes
    Poly f = Poly::coordinate(0) * Poly::coordinate(2) -
             Poly::coordinate(1) * Poly::coordinate(3);  // Re(z1 z2)
    ContactForm am = perturbed_form(1, f, 0.05);
    OrbitSearchConfig ocfg;
    ocfg.seed_radii = 3;
    ocfg.seed_angles = 6;
    auto census = find_orbits(am, ocfg);
    CHECK(!census.orbits.empty());
    bool saw_noncircular = false;
    for (const auto& o : census.orbits) {
        NormalizedForm nm = normalize(am, o);
        if (!nm.circular) {
            saw_noncircular = true;
            CHECK_THROWS_AS(normalize(am, o, {}, /*require_circular=*/true), AlignmentFailure);
        }
        CHECK(nm.fiber_closure < 1e-8);  // orbit through z_* always closes
    }
    CHECK(saw_noncircular);
}

TEST_CASE("return map: zoll gives P = id, tau = 1") {
    ContactForm a = zoll_form(1);
    ReturnGridConfig cfg = small_grid();
    cfg.integ.rel_tol = cfg.integ.abs_tol = 1e-12;
    ReturnData rd = return_map(a, cfg);
    auto [dp, dt] = zoll_return_deviation(rd);
    CHECK(dp < 1e-9);
    CHECK(dt < 1e-9);
    CHECK(boundary_identity_residual(rd) < 1e-8);
    CHECK(std::abs(rd.boundary_rotation()) < 1e-9);

    // int tau dlambda = Vol = 1, int dlambda = t_sigma = 1
    CHECK(rd.integral_tau_dlambda() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(rd.integral_sigma_dlambda()) < 1e-9);

    CalabiReport cal = action_and_calabi(rd, contact_volume(a));
    CHECK(std::abs(cal.cal) < 1e-9);
    CHECK(cal.identity_residual < 1e-9);
}

TEST_CASE("return map identities for a fiber-preserving perturbation") {
    double eps = 0.05;
    ContactForm raw = perturbed_form(1, named_generator("resonant"), eps);
    NormalizedForm nf = normalize(raw, fiber_orbit());  // fiber has period exactly 1
    REQUIRE(nf.circular);
    ReturnData rd = return_map(nf.form, small_grid());

    double vol = contact_volume(nf.form);
    // volume identity |Vol - int tau dlambda| / Vol < 1e-4
    CHECK(std::abs(vol - rd.integral_tau_dlambda()) / vol < 1e-4);
    // boundary normalisation
    CHECK(boundary_identity_residual(rd) < 1e-6);
    // nodal exactness P^* lambda - lambda - dtau
    CHECK(exactness_nodal_residual(rd) < 1e-5);
    // calabi identity
    CalabiReport cal = action_and_calabi(rd, vol);
    CHECK(cal.identity_residual < 1e-4);

    // loop exactness (derivative-free)
    double lr = loop_exactness_residual(nf.form, 8, 77, rd.cfg.integ);
    CHECK(lr < 1e-7);
}

TEST_CASE("fixed points correspond to orbits with the right period") {
    double eps = 0.05;
    ContactForm raw = perturbed_form(1, named_generator("resonant"), eps);
    NormalizedForm nf = normalize(raw, fiber_orbit());
    ReturnData rd = return_map(nf.form, small_grid());
    auto fps = fixed_point_orbit_check(rd, nf.form);
    CHECK(!fps.empty());
    for (const auto& fp : fps) {
        CHECK(fp.closure_residual < 1e-7);
        CHECK(fp.period_residual < 1e-6);
    }
}

TEST_CASE("radial perturbation: center fixed point and sign of the action integral") {
    double eps = 0.04;
    ContactForm raw = perturbed_form(1, named_generator("radial"), eps);
    // normalise at the minimal orbit (the boundary fiber, period 1-eps/2)
    NormalizedForm nf = normalize(raw, fiber_orbit(1.0 - 0.5 * eps));
    REQUIRE(nf.circular);
    ReturnData rd = return_map(nf.form, small_grid());

    // rho_sys >= 1/t for the minimal normalisation => int sigma dlambda <= 0 is
    // the corollary's contrapositive; here rho_sys < 1 so the integral must be > 0
    double vol = contact_volume(nf.form);
    double rho_sys = 1.0 / vol;  // T_min = 1 after normalisation
    CHECK(rho_sys < 1.0);
    CHECK(rd.integral_sigma_dlambda() > 0.0);

    // the center fixed point exists and its period exceeds T_ref
    auto fps = fixed_point_orbit_check(rd, nf.form);
    REQUIRE(!fps.empty());
    bool center_found = false;
    for (const auto& fp : fps) {
        if (std::abs(fp.w) < 1e-6) {
            center_found = true;
            CHECK(fp.sigma > 0.0);
            CHECK(fp.tau ==
                  doctest::Approx((1.0 + 0.5 * eps) / (1.0 - 0.5 * eps)).epsilon(1e-8));
        }
        CHECK(fp.closure_residual < 1e-7);
        CHECK(fp.period_residual < 1e-6);
    }
    CHECK(center_found);

    CalabiReport cal = action_and_calabi(rd, vol);
    CHECK(cal.identity_residual < 1e-4);
    // closed form: Vol(alpha') = (1 + eps^2/12) / (1-eps/2)^2, t = 1
    double volp = (1.0 + eps * eps / 12.0) / ((1.0 - 0.5 * eps) * (1.0 - 0.5 * eps));
    CHECK(vol == doctest::Approx(volp).epsilon(1e-10));
    CHECK(2.0 * cal.cal_normalized == doctest::Approx(volp - 1.0).epsilon(1e-3));
}
