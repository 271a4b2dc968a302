#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reeblab/errors.hpp"
#include <cmath>

#include "reeblab/harness.hpp"

using namespace reeblab;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("config parsing") {
    ExperimentConfig c = parse_config(R"({
        "p": 2,
        "generator": "radial",
        "eps": [0.0, 0.02],
        "integrator": {"rel_tol": 1e-9, "abs_tol": 1e-9},
        "orbits": {"t_cap": 1.4, "seed_radii": 3},
        "seed": 7
    })");
    CHECK(c.p == 2);
    CHECK(c.generator == "radial");
    CHECK(c.eps.size() == 2);
    CHECK(c.integ.rel_tol == doctest::Approx(1e-9));
    CHECK(c.orbits.t_cap == doctest::Approx(1.4));
    CHECK(c.seed == 7);

    // unknown keys are rejected with a path
    CHECK_THROWS_AS(parse_config(R"({"pp": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"orbits": {"tcap": 1.4}})"), ConfigError);
    // invariant violations
    CHECK_THROWS_AS(parse_config(R"({"p": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"orbits": {"t_cap": 2.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"integrator": {"rel_tol": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"eps": [0.9]})"), ConfigError);
    // non-deck-invariant custom perturbation on a lens space
    CHECK_THROWS_AS(parse_config(R"({
        "p": 2, "generator": "custom",
        "custom_terms": [{"coef": 1.0, "monomial": [1, 0, 0, 0]}]
    })"), ConfigError);
    // the same term is fine on S^3
    ExperimentConfig ok = parse_config(R"({
        "p": 1, "generator": "custom",
        "custom_terms": [{"coef": 1.0, "monomial": [1, 0, 0, 0]}]
    })");
    CHECK(ok.custom_terms.size() == 1);

    // config echo round trip
    ExperimentConfig c2 = parse_config(config_to_json(c));
    CHECK(c2.p == c.p);
    CHECK(c2.eps == c.eps);
    CHECK(c2.seed == c.seed);
}

TEST_CASE("verdict and exit code logic") {
    std::vector<ResultRecord> recs(3);
    recs[0].verdict = "zoll_equality";
    recs[1].verdict = "strict_inequality";
    recs[2].verdict = "strict_inequality";
    CHECK(exit_code_for(recs) == 0);
    recs[2].verdict = "out_of_regime";
    CHECK(exit_code_for(recs) == 2);
    recs[1].verdict = "violation";
    CHECK(exit_code_for(recs) == 3);
}

TEST_CASE("small sweep: zoll equality and strict inequality") {
    ExperimentConfig cfg;
    cfg.generator = "radial";
    cfg.eps = {0.0, 0.05};
    cfg.orbits.seed_radii = 2;
    cfg.orbits.seed_angles = 3;
    cfg.section.n_r = 16;
    cfg.section.n_theta = 24;
    cfg.section.n_s = 10;
    cfg.section.n_phi = 16;
    auto recs = run_sweep(cfg);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].verdict == "zoll_equality");
    CHECK(recs[0].rho_sys == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(recs[0].rho_dia == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(recs[1].verdict == "strict_inequality");
    CHECK(recs[1].rho_sys < 1.0);
    CHECK(recs[1].rho_dia > 1.0);
    CHECK(recs[1].res_calabi >= 0);
    CHECK(recs[1].res_calabi < 1e-4);
    CHECK(recs[1].res_volume < 1e-4);
    CHECK(recs[1].res_boundary < 1e-6);

    // out-of-regime guard
    ExperimentConfig big = cfg;
    big.eps = {0.4};
    auto recs2 = run_sweep(big);
    CHECK(recs2[0].verdict == "out_of_regime");
    CHECK(exit_code_for(recs2) == 2);
}

TEST_CASE("emission: csv shape and determinism") {
    ExperimentConfig cfg;
    cfg.generator = "radial";
    cfg.eps = {0.0, 0.01, 0.02, 0.03, 0.04};
    cfg.orbits.seed_radii = 2;
    cfg.orbits.seed_angles = 3;
    cfg.section.n_r = 12;
    cfg.section.n_theta = 16;
    cfg.section.n_s = 8;
    cfg.section.n_phi = 12;
    auto recs = run_sweep(cfg);
    REQUIRE(recs.size() == 5);

    fs::path dir1 = fs::temp_directory_path() / "reeblab_test_out1";
    fs::path dir2 = fs::temp_directory_path() / "reeblab_test_out2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    emit_records(recs, cfg, dir1.string());
    auto recs2 = run_sweep(cfg);
    emit_records(recs2, cfg, dir2.string());

    std::string csv1 = slurp(dir1 / "records.csv");
    std::string csv2 = slurp(dir2 / "records.csv");
    CHECK(csv1 == csv2);  // bitwise-identical rerun
    // header + 5 data rows, stable ordering
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 6);
    CHECK(csv1.rfind("eps,t_min,t_max,vol,rho_sys,rho_dia,inv_t_sigma,cal,", 0) == 0);
    CHECK(csv1.find("zoll_equality") != std::string::npos);

    std::string summary = slurp(dir1 / "summary.json");
    CHECK(summary.find("\"version\"") != std::string::npos);
    CHECK(summary.find("\"config\"") != std::string::npos);

    CHECK_THROWS_AS(emit_records({}, cfg, dir1.string()), IoError);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("discmap suite determinism and aggregates (small)") {
    ExperimentConfig cfg;
    cfg.dm_trials = 3;
    cfg.dm_n_rho = 28;
    cfg.dm_n_theta = 32;
    cfg.dm_n_t = 7;
    DiscmapSuiteReport a = discmap_suite(cfg);
    DiscmapSuiteReport b = discmap_suite(cfg);
    REQUIRE(a.trials.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(a.trials[i].roundtrip_g == b.trials[i].roundtrip_g);  // bitwise
        CHECK(a.trials[i].hj == b.trials[i].hj);
        CHECK(a.trials[i].witness_ok);
    }
    CHECK(a.witness_negative_branch == 3);
    CHECK(a.witness_positive_branch == 3);
    CHECK(a.worst_roundtrip_g < 1e-8);
    CHECK(a.worst_roundtrip_map < 1e-8);
    CHECK(a.worst_hj < 1e-6);
    CHECK(a.rotation_sigma_residual < 1e-9);
    CHECK(a.rotation_cal_residual < 1e-9);
}

TEST_CASE("vfunction grid csv round trip and g_spec parsing") {
    DiscModel disc(1);
    DiscGrid grid(disc, 20, 16);
    NodalField f(grid);
    for (int i = 0; i < grid.n_rho(); ++i)
        for (int j = 0; j < grid.n_theta; ++j)
            f.at(i, j) = std::sin(grid.rho[i]) * std::cos(kTwoPi * grid.theta(j));
    fs::path p = fs::temp_directory_path() / "reeblab_vf.csv";
    write_vfunction_csv(f, p.string());
    NodalField g = read_vfunction_csv(grid, p.string());
    for (size_t i = 0; i < f.v.size(); ++i) CHECK(f.v[i] == g.v[i]);
    fs::remove(p);

    ExperimentConfig cfg = parse_config(R"({
        "discmap": {"g_spec": {"radial": [0.001],
                               "terms": [{"m": 1, "sin": true, "core": [0.00005]}]}}
    })");
    REQUIRE(cfg.dm_g_spec.size() == 2);
    SingleGReport rep = single_g_suite(cfg);
    CHECK(rep.roundtrip_g < 1e-10);
    CHECK(rep.hj < 1e-8);
    CHECK(std::abs(rep.cal_from_sigma - rep.cal_from_h) < 1e-8);
}

TEST_CASE("verify_reduction on the radial family") {
    ExperimentConfig cfg;
    cfg.generator = "radial";
    cfg.orbits.seed_radii = 2;
    cfg.orbits.seed_angles = 3;
    cfg.section.n_r = 16;
    cfg.section.n_theta = 24;
    cfg.section.n_s = 10;
    cfg.section.n_phi = 16;

    ReductionReport zoll = verify_reduction(cfg, 0.0);
    CHECK(zoll.zoll_vacuous);

    ReductionReport red = verify_reduction(cfg, 0.05);
    CHECK_FALSE(red.zoll_vacuous);
    // minimal normalisation: action integral positive, longer-orbit witness
    CHECK(red.min_int_sigma > 0);
    CHECK(red.min_witness_found);
    CHECK(red.min_witness_sigma > 0);
    CHECK(red.min_witness_period_residual < 1e-6);
    // maximal normalisation: mirrored
    CHECK(red.max_int_sigma < 0);
    CHECK(red.max_witness_found);
    CHECK(red.max_witness_sigma < 0);
    CHECK(red.max_witness_period_residual < 1e-6);
}
