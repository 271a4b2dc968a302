#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reeblab/discmaps.hpp"
#include "reeblab/errors.hpp"

using namespace reeblab;

namespace {
const DiscModel kDisc1(1);  // k = 1, a = sqrt 2
}

TEST_CASE("weinstein chart formulas") {
    // diagonal to zero section
    auto d = weinstein_map(0.7, 0.3, 0.7, 0.3);
    CHECK(d.p_rho == doctest::Approx(0.0));
    CHECK(d.p_theta == doctest::Approx(0.0));

    auto img = weinstein_map(1.0, 0.30, 1.2, 0.20);
    CHECK(img.rho == doctest::Approx(1.2));
    CHECK(img.vartheta == doctest::Approx(0.30));
    CHECK(img.p_rho == doctest::Approx(0.12));
    CHECK(img.p_theta == doctest::Approx(0.22));

    auto pre = weinstein_inverse(1.2, 0.30, 0.12, 0.22);
    CHECK(pre.r == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pre.theta == doctest::Approx(0.30));
    CHECK(pre.R == doctest::Approx(1.2));
    CHECK(pre.Theta == doctest::Approx(0.20).epsilon(1e-14));

    // zero section to the diagonal
    auto diag = weinstein_inverse(0.9, 0.1, 0.0, 0.0);
    CHECK(diag.r == doctest::Approx(0.9));
    CHECK(diag.Theta == doctest::Approx(0.1));

    // round trips on random interior samples
    SplitMix64 rng(21);
    for (int i = 0; i < 200; ++i) {
        double r = rng.uniform(0.05, 1.3), th = rng.uniform(0, 1);
        double R = rng.uniform(0.05, 1.3), Th = th + rng.uniform(-0.45, 0.45);
        auto im = weinstein_map(r, th, R, Th);
        auto back = weinstein_inverse(im.rho, im.vartheta, im.p_rho, im.p_theta);
        CHECK(back.r == doctest::Approx(r).epsilon(1e-14));
        CHECK(back.theta == doctest::Approx(th).epsilon(1e-14));
        CHECK(back.R == doctest::Approx(R).epsilon(1e-14));
        CHECK(back.Theta == doctest::Approx(Th).epsilon(1e-14));
    }

    CHECK_THROWS_AS(weinstein_map(1, 0.8, 1, 0.2), OutOfDomain);
    CHECK_THROWS_AS(weinstein_inverse(1.0, 0, 0, 0.8), NegativeRadicand);
    CHECK_THROWS_AS(weinstein_inverse(0.0, 0, 0.1, -0.2), DivisionAtBinding);
}

TEST_CASE("symplectic primitive identity W^* lambda_can = (-lambda)+lambda - dK") {
    // coefficients of both sides on (dr, dtheta, dR, dTheta) at random samples
    const double k = 2.0;
    SplitMix64 rng(5);
    for (int i = 0; i < 300; ++i) {
        double r = rng.uniform(0.05, 1.5), th = rng.uniform(0, 1);
        double R = rng.uniform(0.05, 1.5), Th = th + rng.uniform(-0.45, 0.45);
        // W^* lambda_can = p_rho d(rho) + p_theta d(vartheta) with rho = R,
        // vartheta = theta:
        double w_dr = 0.0;
        double w_dth = 0.5 * (R * R - r * r);
        double w_dR = R * (th - Th);
        double w_dTh = 0.0;
        // (-lambda) (+) lambda
        double l_dth = -(-k + 0.5 * r * r);
        double l_dTh = (-k + 0.5 * R * R);
        // dK, K = (k - R^2/2)(theta - Theta)
        double K_dr = 0.0;
        double K_dth = (k - 0.5 * R * R);
        double K_dR = -R * (th - Th);
        double K_dTh = -(k - 0.5 * R * R);
        CHECK(std::abs(w_dr - (0.0 - K_dr)) < 1e-10);
        CHECK(std::abs(w_dth - (l_dth - K_dth)) < 1e-10);
        CHECK(std::abs(w_dR - (0.0 - K_dR)) < 1e-10);
        CHECK(std::abs(w_dTh - (l_dTh - K_dTh)) < 1e-10);

        CHECK(k_primitive(r, th, R, Th, k) == doctest::Approx((k - 0.5 * R * R) * (th - Th)));
    }
    // K on the diagonal vanishes; R = sqrt(2k) kills the prefactor
    CHECK(k_primitive(0.4, 0.7, 0.4, 0.7, k) == doctest::Approx(0.0));
    CHECK(std::abs(k_primitive(1.0, 0.0, std::sqrt(2.0), 0.3, 1.0)) < 1e-14);
    CHECK(k_primitive(0.0, 0.3, 0.0, 0.2, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("hat divide and radial split") {
    auto grid = std::make_shared<DiscGrid>(kDisc1, 40, 32);
    // f = r^2 -> fhat = r
    NodalField f(*grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j) f.at(i, j) = grid->rho[i] * grid->rho[i];
    NodalField fh = hat_divide(f);
    for (int i = 0; i < grid->n_rho(); ++i)
        CHECK(fh.at(i, 7) == doctest::Approx(grid->rho[i]).epsilon(1e-10));

    // f = r sin(2 pi theta) -> fhat = sin(2 pi theta)
    NodalField f2(*grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j)
            f2.at(i, j) = grid->rho[i] * std::sin(kTwoPi * grid->theta(j));
    NodalField fh2 = hat_divide(f2);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j)
            CHECK(fh2.at(i, j) ==
                  doctest::Approx(std::sin(kTwoPi * grid->theta(j))).epsilon(1e-9));

    // f = 0 -> 0
    NodalField z(*grid, 0.0);
    NodalField zh = hat_divide(z);
    for (double v : zh.v) CHECK(v == doctest::Approx(0.0));

    // non-vanishing boundary is rejected
    NodalField bad(*grid, 1.0);
    CHECK_THROWS_AS(hat_divide(bad), NonVanishingBoundary);

    // radial split: f = eps/2 rho^2 -> (eps, 0)
    double eps = 0.3;
    NodalField f3(*grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j)
            f3.at(i, j) = 0.5 * eps * grid->rho[i] * grid->rho[i];
    auto sp = radial_split(f3);
    for (int i = 0; i < grid->n_rho(); ++i) {
        CHECK(sp.f_rho.at(i, 3) == doctest::Approx(eps).epsilon(1e-9));
        CHECK(std::abs(sp.f_theta.at(i, 3)) < 1e-9);
    }

    // f = rho^2 sin(2 pi t) -> f_rho = 2 sin, f_theta = 2 pi cos
    NodalField f4(*grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j)
            f4.at(i, j) = grid->rho[i] * grid->rho[i] * std::sin(kTwoPi * grid->theta(j));
    auto sp4 = radial_split(f4);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j) {
            CHECK(sp4.f_rho.at(i, j) ==
                  doctest::Approx(2.0 * std::sin(kTwoPi * grid->theta(j))).epsilon(1e-8));
            CHECK(sp4.f_theta.at(i, j) ==
                  doctest::Approx(kTwoPi * std::cos(kTwoPi * grid->theta(j))).epsilon(1e-8));
        }
    // norm equivalence bound is reported and finite
    CHECK(sp4.norm_split > 0);
    CHECK(sp4.norm_hat > 0);
}

TEST_CASE("vfunction basics") {
    // G = 1/2 eps rho^2: V-norm pieces are exact
    double eps = 0.02;
    VFunction G = VFunction::radial(kDisc1, {0.5 * eps});
    auto J = G.jet(1.0, 0.3);
    CHECK(J.g == doctest::Approx(0.5 * eps));
    CHECK(J.g_r == doctest::Approx(eps));
    CHECK(J.hr == doctest::Approx(eps));
    CHECK(J.ht == doctest::Approx(0.0));

    // boundary conditions f = df = 0 at r = 0
    for (const auto& seed : {11ull, 12ull, 13ull}) {
        VFunction R = VFunction::random(kDisc1, seed, 0.01);
        for (double th : {0.0, 0.4}) {
            auto j0 = R.jet(0.0, th);
            CHECK(std::abs(j0.g) < 1e-12);
            CHECK(std::abs(j0.g_r) < 1e-12);
            CHECK(std::abs(j0.g_t) < 1e-12);
        }
        CHECK(R.vnorm() == doctest::Approx(0.01).epsilon(1e-6));
        // radial (admissible) near the disc center
        auto jc = R.jet(0.95 * kDisc1.a_max, 0.1);
        auto jc2 = R.jet(0.95 * kDisc1.a_max, 0.7);
        CHECK(jc.g == doctest::Approx(jc2.g).epsilon(1e-12));
        CHECK(std::abs(jc.g_t) < 1e-14);
    }
}

TEST_CASE("E and G: identity and rotation") {
    auto grid = std::make_shared<DiscGrid>(kDisc1, 40, 48);

    // G = 0 -> identity
    VFunction zero = VFunction::radial(kDisc1, {0.0});
    ExactDiscMap id = map_from_gen(zero);
    CHECK(id.R(0.7, 0.2) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(id.Dtheta(0.7, 0.2)) < 1e-12);
    CHECK(std::abs(id.sigma(0.7, 0.2)) < 1e-12);

    // G = 1/2 eps rho^2 (k=1) -> rotation by -eps, sigma = eps, CAL = eps/2
    double eps = 0.03;
    VFunction rot = VFunction::radial(kDisc1, {0.5 * eps});
    ExactDiscMap phi = map_from_gen(rot);
    SplitMix64 rng(31);
    for (int i = 0; i < 50; ++i) {
        double r = rng.uniform(0.0, 1.41), th = rng.uniform(0, 1);
        CHECK(phi.R(r, th) == doctest::Approx(r).epsilon(1e-12));
        CHECK(phi.Dtheta(r, th) == doctest::Approx(-eps).epsilon(1e-12));
        CHECK(phi.sigma(r, th) == doctest::Approx(eps).epsilon(1e-12));
    }
    CHECK(calabi(phi, *grid) == doctest::Approx(0.5 * eps).epsilon(1e-12));

    // radial twist phi = (r, theta - g'(r)/r) for radial G
    VFunction gq = VFunction::radial(kDisc1, {0.0, 0.01});  // G = 0.01 rho^4
    ExactDiscMap tw = map_from_gen(gq);
    for (int i = 1; i < 8; ++i) {
        double r = 0.17 * i;
        CHECK(tw.R(r, 0.3) == doctest::Approx(r).epsilon(1e-12));
        // g'(r)/r = 0.04 r^2
        CHECK(tw.Dtheta(r, 0.3) == doctest::Approx(-0.04 * r * r).epsilon(1e-12));
    }

    // G(E(G)) recovers the generating function
    auto gv = gen_from_map(phi, *grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j)
            CHECK(std::abs(gv[grid->idx(i, j)] -
                           0.5 * eps * grid->rho[i] * grid->rho[i]) < 1e-10);
}

TEST_CASE("round trips for random admissible G") {
    auto grid = std::make_shared<DiscGrid>(kDisc1, 40, 48);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        VFunction G = VFunction::random(kDisc1, seed, 0.01);
        ExactDiscMap phi = map_from_gen(G);
        // sup |G(E(G)) - G| over the grid
        auto gv = gen_from_map(phi, *grid);
        double worst = 0;
        for (int i = 0; i < grid->n_rho(); ++i)
            for (int j = 0; j < grid->n_theta; ++j)
                worst = std::max(worst, std::abs(gv[grid->idx(i, j)] -
                                                 G.value(grid->rho[i], grid->theta(j))));
        CHECK(worst < 1e-8);

        // E(G(phi)) returns to phi; C0 distance in the disc metric
        // max(|w difference|, |r difference|)
        GenFunction gn = gen_function_of_map(phi);
        ExactDiscMap phi2 = map_from_gen(gn);
        double dmap = 0;
        for (int i = 0; i < 37; ++i) {
            double r = kDisc1.a_max * i / 37.0;
            for (int j = 0; j < 11; ++j) {
                double th = (j + 0.21) / 11.0;
                auto [R1, T1] = phi.apply(r, th);
                auto [R2, T2] = phi2.apply(r, th);
                double dw = std::abs(kDisc1.w_of_collar(R1, T1) - kDisc1.w_of_collar(R2, T2));
                dmap = std::max({dmap, dw, std::abs(R1 - R2)});
            }
        }
        CHECK(dmap < 1e-8);

        // the nodal realisation (spectral derivatives of grid data) is coarser
        // but must stay within the smoothness-limited budget
        if (seed == 1) {
            GenFunction gnod = GenFunction::from_nodal(grid, gv);
            ExactDiscMap phin = map_from_gen(gnod);
            double dn = 0;
            for (int i = 0; i < 19; ++i) {
                double r = kDisc1.a_max * i / 19.0;
                double th = 0.31;
                auto [R1, T1] = phi.apply(r, th);
                auto [R2, T2] = phin.apply(r, th);
                dn = std::max({dn, std::abs(R1 - R2), r * std::abs(T1 - T2)});
            }
            CHECK(dn < 1e-5);
        }

        // exactness of E(G): loop integrals of phi^* lambda - lambda vanish;
        // equivalently the normalised action is a genuine primitive, checked
        // through sigma's consistency: sigma = G o nu + K o Gamma has been
        // verified via the round trip; here check the boundary normalisation
        for (int j = 0; j < 8; ++j) {
            double th = j / 8.0;
            double s0 = phi.sigma(0.0, th);
            double kg = k_primitive(0.0, th, 0.0, th + phi.Dtheta(0.0, th), 1.0);
            CHECK(std::abs(s0 - kg) < 1e-9);
        }
    }
}

TEST_CASE("fixed points of E(G) are critical points of G with sigma = G") {
    VFunction G = VFunction::random(kDisc1, 77, 0.02);
    ExactDiscMap phi = map_from_gen(G);
    auto fps = interior_fixed_points(phi);
    CHECK(!fps.empty());
    for (const auto& fp : fps) {
        if (fp.r >= kDisc1.a_max - 1e-9) continue;  // center handled below
        auto J = G.jet(fp.r, fp.theta);
        // gradient of G vanishes at the fixed point
        CHECK(std::abs(J.g_r) < 1e-6);
        CHECK(std::abs(J.g_t) < 1e-6);
        // sigma = G there
        CHECK(std::abs(fp.sigma - J.g) < 1e-8);
    }
    // center: fixed with sigma = G(center)
    const auto& c = fps.back();
    CHECK(c.r == doctest::Approx(kDisc1.a_max));
    CHECK(std::abs(c.sigma - G.value(kDisc1.a_max, 0.0)) < 1e-9);
}

TEST_CASE("hamiltonian path, HJ equation, quasi-autonomy, calabi") {
    // rotation family: everything in closed form
    double eps = 0.02;
    VFunction rot = VFunction::radial(kDisc1, {0.5 * eps});
    HamiltonianPath hp = hamiltonian_of_path(rot, 9, 24, 32);
    // X = -eps dtheta, H = 1/2 eps r^2 at the moved points
    for (int it = 0; it < 9; ++it)
        for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 32; ++j) {
                int id = hp.grid->idx(i, j);
                CHECK(std::abs(hp.xr[it][id]) < 1e-10);
                CHECK(hp.xth[it][id] == doctest::Approx(-eps).epsilon(1e-9));
                double r = hp.grid->rho[i];
                CHECK(hp.h_moved[it][id] == doctest::Approx(0.5 * eps * r * r).epsilon(1e-9));
            }
    CHECK(hj_residual(hp) < 1e-10);  // exactly linear in t
    CHECK(hamiltonian_field_residual(hp) < 1e-8);

    CalabiValues cv = calabi_both(map_from_gen(rot), hp);
    CHECK(cv.from_sigma == doctest::Approx(0.5 * eps).epsilon(1e-10));
    CHECK(cv.from_h == doctest::Approx(0.5 * eps).epsilon(1e-9));
    CHECK(cv.difference < 1e-9);

    QAReport qa = quasi_autonomous_path(rot, hp);
    CHECK(!qa.degenerate);
    CHECK(qa.r_min == doctest::Approx(0.0));          // min on the boundary, value 0
    CHECK(qa.r_max == doctest::Approx(kDisc1.a_max));  // max at the center, value eps k
    CHECK(qa.drift_min < 0.15);
    CHECK(qa.drift_max < 0.15);
    CHECK(qa.value_dev_min < 1e-9);
    CHECK(qa.value_dev_max < 1e-9);

    // degenerate case: G = 0 flagged
    QAReport qz = quasi_autonomous_path(VFunction::radial(kDisc1, {0.0}),
                                        hamiltonian_of_path(VFunction::radial(kDisc1, {0.0}),
                                                            5, 8, 8));
    CHECK(qz.degenerate);

    // random G: HJ residual small, quasi-autonomy certified
    VFunction G = VFunction::random(kDisc1, 5, 0.01);
    HamiltonianPath hg = hamiltonian_of_path(G, 13, 28, 40);
    CHECK(hj_residual(hg) < 1e-6);
    double spacing = path_grid_spacing(*hg.grid);
    QAReport qg = quasi_autonomous_path(G, hg);
    CHECK(qg.drift_min < spacing);
    CHECK(qg.drift_max < spacing);
    CHECK(qg.value_dev_min < 1e-9);
    CHECK(qg.value_dev_max < 1e-9);

    // reconstructed flow of X_t reproduces phi_t: RK4 in t on a few points
    {
        int n_t = (int)hg.t_nodes.size();
        (void)n_t;
        VFunction Gr = G;
        auto X = [&](double t, double r, double th) {
            // X_t at (r,th): invert phi_t then differentiate the path formula;
            // here use the Hamiltonian identities in the collar instead:
            // X^R = (1/R) dH/dTheta with H o phi = G o nu; evaluate by finite
            // differences of E(tG) around the point.
            const double dt = 1e-5;
            ExactDiscMap pa = map_from_gen(Gr.scaled(std::max(0.0, t - dt)));
            ExactDiscMap pb = map_from_gen(Gr.scaled(std::min(1.0, t + dt)));
            // X(phi_t(q)) ~ (phi_{t+dt}(q) - phi_{t-dt}(q)) / (2 dt) with
            // q = phi_t^{-1}(point); one Newton solve
            ExactDiscMap pt = map_from_gen(Gr.scaled(t));
            ExactDiscMap ptinv = map_inverse(pt);
            double q_r = ptinv.R(r, th);
            double q_t = th + ptinv.Dtheta(r, th);
            auto [ra, ta] = pa.apply(q_r, q_t);
            auto [rb, tb] = pb.apply(q_r, q_t);
            double denom = std::min(1.0, t + dt) - std::max(0.0, t - dt);
            return std::make_pair((rb - ra) / denom, (tb - ta) / denom);
        };
        double r = 0.9, th = 0.37;
        double cr = r, ct = th;
        int steps = 40;
        for (int s = 0; s < steps; ++s) {
            double t = double(s) / steps, h = 1.0 / steps;
            auto k1 = X(t, cr, ct);
            auto k2 = X(t + h / 2, cr + h / 2 * k1.first, ct + h / 2 * k1.second);
            auto k3 = X(t + h / 2, cr + h / 2 * k2.first, ct + h / 2 * k2.second);
            auto k4 = X(t + h, cr + h * k3.first, ct + h * k3.second);
            cr += h / 6 * (k1.first + 2 * k2.first + 2 * k3.first + k4.first);
            ct += h / 6 * (k1.second + 2 * k2.second + 2 * k3.second + k4.second);
        }
        ExactDiscMap p1 = map_from_gen(G);
        auto [R1, T1] = p1.apply(r, th);
        CHECK(std::abs(cr - R1) < 1e-7);
        CHECK(std::abs(ct - T1) < 1e-7);
    }
}

TEST_CASE("calabi antisymmetry and sign witness") {
    auto grid = std::make_shared<DiscGrid>(kDisc1, 36, 48);
    VFunction G = VFunction::random(kDisc1, 404, 0.02);
    ExactDiscMap phi = map_from_gen(G);
    double cal = calabi(phi, *grid);
    ExactDiscMap inv = map_inverse(phi);
    CHECK(calabi(inv, *grid) == doctest::Approx(-cal).epsilon(1e-8));

    // rotation: CAL > 0, witness at the center with sigma = eps k > 0
    double eps = 0.02;
    VFunction rot = VFunction::radial(kDisc1, {0.5 * eps});
    ExactDiscMap pr = map_from_gen(rot);
    WitnessPoint wr = sign_witness(rot, pr, *grid, 0.5 * eps);
    CHECK(wr.r == doctest::Approx(kDisc1.a_max));
    CHECK(wr.sigma_value == doctest::Approx(eps).epsilon(1e-10));

    // mirror -G: witness with sigma < 0
    VFunction mrot = rot.scaled(-1.0);
    ExactDiscMap pm = map_from_gen(mrot);
    WitnessPoint wm = sign_witness(mrot, pm, *grid, -0.5 * eps);
    CHECK(wm.sigma_value < 0.0);

    // randomized sweep on both branches
    int found = 0, trials = 0;
    for (uint64_t seed = 100; seed < 110; ++seed) {
        VFunction g = VFunction::random(kDisc1, seed, 0.015);
        ExactDiscMap p = map_from_gen(g);
        double c = calabi(p, *grid);
        VFunction gg = (c <= 0) ? g : g.scaled(-1.0);
        ExactDiscMap pp = (c <= 0) ? std::move(p) : map_from_gen(gg);
        double cc = (c <= 0) ? c : calabi(pp, *grid);
        ++trials;
        WitnessPoint w = sign_witness(gg, pp, *grid, cc);
        CHECK(w.sigma_value < 0.0);
        CHECK(w.g_value < 0.0);
        CHECK(w.fix_residual < 1e-7);
        ++found;
    }
    CHECK(found == trials);
}
