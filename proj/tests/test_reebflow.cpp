#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/errors.hpp"
#include "reeblab/numerics.hpp"
#include "reeblab/reebflow.hpp"

using namespace reeblab;

namespace {
Point4 sample_point(uint64_t k) {
    auto pts = SpherePoints::generate(int(k + 1));
    auto& p = pts.back();
    return Point4(Vec4{{p[0], p[1], p[2], p[3]}});
}
} // namespace

TEST_CASE("zoll flow closes at t = 1 and is the hopf rotation") {
    ContactForm a = zoll_form(1);
    for (uint64_t k : {0, 5, 17}) {
        Point4 q = sample_point(k);
        Point4 q1 = integrate(a, q, 1.0);
        CHECK((q1.x - q.x).norm() < 1e-9);
        Point4 qh = integrate(a, q, 0.5);
        CHECK((qh.x - phase_mul(q.x, 0.5)).norm() < 1e-9);  // e^{pi i} q = -q
        Point4 qt = integrate(a, q, 0.37);
        CHECK((qt.x - phase_mul(q.x, 0.37)).norm() < 1e-9);
    }
}

TEST_CASE("time reversal and group law") {
    ContactForm a = perturbed_form(1, named_generator("mixed"), 0.05);
    Point4 q = sample_point(3);
    Point4 fwd = integrate(a, q, 0.8);
    Point4 back = integrate(a, fwd, -0.8);
    CHECK((back.x - q.x).norm() < 2e-9);

    SplitMix64 rng(99);
    for (int i = 0; i < 5; ++i) {
        double s = rng.uniform(0.0, 1.0), t = rng.uniform(0.0, 1.0);
        Point4 one = integrate(a, q, s + t);
        Point4 two = integrate(a, integrate(a, q, t), s);
        CHECK((one.x - two.x).norm() < 5e-9);
    }
}

TEST_CASE("lens zoll flow: one deck step per unit time") {
    ContactForm a2 = zoll_form(2);
    Point4 q = sample_point(7);
    q.lens_order = 2;
    Point4 q1 = integrate(a2, q, 1.0);
    CHECK((q1.x - phase_mul(q.x, 0.5)).norm() < 1e-9);  // e^{pi i} q
    Point4 q2 = integrate(a2, q, 2.0);
    CHECK((q2.x - q.x).norm() < 2e-9);
}

TEST_CASE("flow preserves the contact volume density") {
    ContactForm a = perturbed_form(1, named_generator("resonant"), 0.05);
    IntegratorConfig tight;
    tight.rel_tol = tight.abs_tol = 1e-12;
    auto pts = SpherePoints::generate(60);
    const double h = 1e-4;
    for (int n = 0; n < 60; n += 7) {
        Point4 q(Vec4{{pts[n][0], pts[n][1], pts[n][2], pts[n][3]}});
        auto b = tangent_basis(q.x);
        // transported frame spans; density ratio must be 1
        Point4 e0 = integrate(a, q, 1.0, tight);
        std::array<Vec4, 3> tb;
        for (int i = 0; i < 3; ++i) {
            Point4 qp(q.x + b[i] * h), qm(q.x - b[i] * h);
            tb[i] = (integrate(a, qp, 1.0, tight).x - integrate(a, qm, 1.0, tight).x) *
                    (1.0 / (2 * h));
        }
        auto dens = [&](const Point4& p, const std::array<Vec4, 3>& fr) {
            double w1 = a.eval(p.x, fr[0]), w2 = a.eval(p.x, fr[1]), w3 = a.eval(p.x, fr[2]);
            double d23 = a.d_eval(p.x, fr[1], fr[2]);
            double d13 = a.d_eval(p.x, fr[0], fr[2]);
            double d12 = a.d_eval(p.x, fr[0], fr[1]);
            return w1 * d23 - w2 * d13 + w3 * d12;
        };
        double before = dens(q, b);
        double after = dens(e0, tb);
        CHECK(std::abs(after / before - 1.0) < 1e-6);
    }
}

TEST_CASE("section return for the zoll form") {
    ContactForm a = zoll_form(1);
    SplitMix64 rng(12);
    for (int i = 0; i < 8; ++i) {
        Cplx w = std::polar(rng.uniform(0.1, 1.3), rng.uniform(0.0, kTwoPi));
        Vec4 q = Vec4::from_complex(w / std::sqrt(2.0),
                                    std::sqrt(1.0 - 0.5 * std::norm(w)));
        SectionCrossing sc = section_return(a, Point4(q));
        CHECK(sc.tau == doctest::Approx(1.0).epsilon(1e-10));
        CHECK((sc.point.x - q).norm() < 1e-9);
        CHECK(sc.event_residual < 1e-12);
    }
}

TEST_CASE("section return for perturbed forms stays near 1") {
    double eps = 0.05;
    ContactForm a = perturbed_form(1, named_generator("radial"), eps);
    SplitMix64 rng(4);
    for (int i = 0; i < 6; ++i) {
        Cplx w = std::polar(rng.uniform(0.2, 1.2), rng.uniform(0.0, kTwoPi));
        Vec4 q = Vec4::from_complex(w / std::sqrt(2.0),
                                    std::sqrt(1.0 - 0.5 * std::norm(w)));
        SectionCrossing sc = section_return(a, Point4(q));
        CHECK(sc.tau > 1.0 / (1.0 + 2 * eps));
        CHECK(sc.tau < 1.0 / (1.0 - 2 * eps));
        CHECK(sc.event_residual < 1e-12);
    }
}

TEST_CASE("orbit census: zoll") {
    ContactForm a = zoll_form(1);
    OrbitSearchConfig cfg;
    cfg.seed_radii = 3;
    cfg.seed_angles = 4;
    auto res = find_orbits(a, cfg);
    CHECK(res.seeds_dropped == 0);
    CHECK(res.orbits.size() == res.seeds_tried + 1u);  // + boundary fiber
    for (const auto& o : res.orbits) {
        CHECK(o.period == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(o.closure_residual < 1e-8);
        CHECK(o.class_h);
    }
    auto [tmin, tmax] = t_min_max(res.orbits);
    CHECK(tmin == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tmax == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("orbit census: radial perturbation has the two extreme fibers") {
    double eps = 0.04;
    ContactForm a = perturbed_form(1, named_generator("radial"), eps);
    OrbitSearchConfig cfg;
    cfg.seed_radii = 3;
    cfg.seed_angles = 4;
    auto res = find_orbits(a, cfg);
    REQUIRE(res.orbits.size() == 2);
    // periods exactly 1 -+ eps/2 for the invariant fibers (f = u - 1/2)
    CHECK(res.orbits.front().period == doctest::Approx(1.0 - 0.5 * eps).epsilon(1e-9));
    CHECK(res.orbits.back().period == doctest::Approx(1.0 + 0.5 * eps).epsilon(1e-9));
    for (const auto& o : res.orbits) {
        CHECK(o.class_h);
        CHECK(o.closure_residual < 1e-8);
    }
    auto [tmin, tmax] = t_min_max(res.orbits);
    double vol = contact_volume(a);
    CHECK(tmin * tmin / vol < 1.0);
    CHECK(tmax * tmax / vol > 1.0);
}

TEST_CASE("orbit periods are invariant under exact shifts") {
    double eps = 0.04;
    ContactForm a = perturbed_form(1, named_generator("radial"), eps);
    Poly h = Poly::coordinate(0) * Poly::coordinate(3) * 0.01;
    ContactForm b = with_exact_shift(a, h);
    OrbitSearchConfig cfg;
    cfg.seed_radii = 2;
    cfg.seed_angles = 3;
    auto ra = find_orbits(a, cfg);
    auto rb = find_orbits(b, cfg);
    REQUIRE(ra.orbits.size() == rb.orbits.size());
    for (size_t i = 0; i < ra.orbits.size(); ++i)
        CHECK(ra.orbits[i].period == doctest::Approx(rb.orbits[i].period).epsilon(1e-8));
}

TEST_CASE("class-h winding") {
    ContactForm a = zoll_form(1);
    Point4 q = sample_point(2);
    CHECK(lift_winding(a, q, 1.0) == 1);
    CHECK(lift_winding(a, q, 2.0) == 2);  // double cover traversal

    // continuation along a family
    for (double eps : {0.0, 0.02, 0.05}) {
        ContactForm ae = perturbed_form(1, named_generator("resonant"), eps);
        OrbitSearchConfig cfg;
        cfg.seed_radii = 2;
        cfg.seed_angles = 3;
        auto res = find_orbits(ae, cfg);
        for (const auto& o : res.orbits) CHECK(o.lift_winding == 1);
    }
}

TEST_CASE("lens census p = 2") {
    ContactForm a = zoll_form(2);
    OrbitSearchConfig cfg;
    cfg.seed_radii = 2;
    cfg.seed_angles = 3;
    auto res = find_orbits(a, cfg);
    CHECK(!res.orbits.empty());
    for (const auto& o : res.orbits) {
        CHECK(o.period == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(o.class_h);
    }
    auto [tmin, tmax] = t_min_max(res.orbits);
    auto [rs, rd] = ratios(a, res.orbits);
    CHECK(rs == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rd == doctest::Approx(0.5).epsilon(1e-8));
    (void)tmin;
    (void)tmax;
}

TEST_CASE("rescaling multiplies periods") {
    ContactForm a = zoll_form(1);
    ContactForm ac = scaled_form(a, 1.3);
    Point4 q = sample_point(1);
    // flow of c alpha closes at t = c
    Point4 q1 = integrate(ac, q, 1.3);
    CHECK((q1.x - q.x).norm() < 2e-9);
}

TEST_CASE("census is stable under seed refinement") {
    ContactForm a = perturbed_form(1, named_generator("mixed"), 0.05);
    OrbitSearchConfig coarse;
    coarse.seed_radii = 3;
    coarse.seed_angles = 6;
    OrbitSearchConfig fine;
    fine.seed_radii = 4;
    fine.seed_angles = 10;
    auto rc = find_orbits(a, coarse);
    auto rf = find_orbits(a, fine);
    // every coarse orbit appears in the fine census; no fine orbit below the
    // cap is lost relative to coarse
    for (const auto& oc : rc.orbits) {
        bool matched = false;
        for (const auto& of : rf.orbits)
            if (std::abs(of.period - oc.period) < 1e-6 &&
                (of.seed.x - oc.seed.x).norm() < 1e-4)
                matched = true;
        CHECK(matched);
    }
    CHECK(rf.orbits.size() >= rc.orbits.size());
}
