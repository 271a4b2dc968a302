// Command-line front end: systolic/diastolic sweeps, orbit censuses, section
// diagnostics and the randomized disc-map suite.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reeblab/errors.hpp"
#include "reeblab/harness.hpp"

using namespace reeblab;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int p = 0;           // 0 = keep config value
    long long seed = -1;
    std::vector<double> eps;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "seed for randomized suites");
    cmd->add_option("--p", o.p, "lens order (1 = S^3)");
    cmd->add_option("--eps", o.eps, "perturbation amplitudes")->delimiter(',');
}

ExperimentConfig make_config(const CommonOpts& o) {
    ExperimentConfig cfg =
        o.config_path.empty() ? ExperimentConfig{} : load_config_file(o.config_path);
    if (o.p > 0) cfg.p = o.p;
    if (o.seed >= 0) cfg.seed = (uint64_t)o.seed;
    if (!o.eps.empty()) cfg.eps = o.eps;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    cfg.orbits.integ = cfg.integ;
    cfg.section.integ = cfg.integ;
    return cfg;
}

void print_records(const std::vector<ResultRecord>& recs) {
    std::printf("%10s %12s %12s %12s %12s %12s %10s  %s\n", "eps", "T_min", "T_max", "Vol",
                "rho_sys", "rho_dia", "1/t_sigma", "verdict");
    for (const auto& r : recs)
        std::printf("%10.4f %12.9f %12.9f %12.9f %12.9f %12.9f %10.6f  %s\n", r.eps, r.t_min,
                    r.t_max, r.vol, r.rho_sys, r.rho_dia, r.inv_t_sigma, r.verdict.c_str());
}

int cmd_ratio(const CommonOpts& o) {
    ExperimentConfig cfg = make_config(o);
    auto recs = run_sweep(cfg);
    print_records(recs);
    if (!cfg.out_dir.empty()) emit_records(recs, cfg, cfg.out_dir);
    return exit_code_for(recs);
}

int cmd_orbits(const CommonOpts& o) {
    ExperimentConfig cfg = make_config(o);
    for (double eps : cfg.eps) {
        ContactForm alpha =
            (eps == 0.0) ? zoll_form(cfg.p) : perturbed_form(cfg.p, cfg.perturbation(), eps);
        auto res = find_orbits(alpha, cfg.orbits);
        std::printf("eps = %g: %zu orbit(s), %d seed(s) dropped\n", eps, res.orbits.size(),
                    res.seeds_dropped);
        for (const auto& orb : res.orbits)
            std::printf("  period %.12f  winding %d  class_h %d  residual %.3e\n", orb.period,
                        orb.lift_winding, (int)orb.class_h, orb.closure_residual);
    }
    return 0;
}

int cmd_section(const CommonOpts& o) {
    ExperimentConfig cfg = make_config(o);
    if (cfg.p != 1) {
        std::fprintf(stderr, "section: the surface-of-section machinery runs on p = 1\n");
        return 1;
    }
    for (double eps : cfg.eps) {
        ContactForm alpha =
            (eps == 0.0) ? zoll_form(1) : perturbed_form(1, cfg.perturbation(), eps);
        auto census = find_orbits(alpha, cfg.orbits);
        const PeriodicOrbit* pick = nullptr;
        for (const auto& orb : census.orbits) {
            if (!orb.class_h) continue;
            NormalizedForm nf = normalize(alpha, orb, cfg.integ);
            if (nf.circular) {
                pick = &orb;
                break;
            }
        }
        if (!pick) {
            std::printf("eps = %g: no circular normalising orbit found\n", eps);
            continue;
        }
        NormalizedForm nf = normalize(alpha, *pick, cfg.integ);
        ReturnData rd = return_map(nf.form, cfg.section);
        double voln = contact_volume(nf.form, cfg.volume);
        CalabiReport cal = action_and_calabi(rd, voln);
        auto fps = fixed_point_orbit_check(rd, nf.form);
        std::printf(
            "eps = %-8g T_ref = %.9f  vol-id %.3e  boundary-id %.3e  exactness %.3e  "
            "calabi-id %.3e  fixed points %zu\n",
            eps, nf.T_ref, std::abs(voln - rd.integral_tau_dlambda()) / voln,
            boundary_identity_residual(rd), exactness_nodal_residual(rd),
            cal.identity_residual, fps.size());
        if (!cfg.out_dir.empty()) {
            namespace fs = std::filesystem;
            fs::create_directories(fs::path(cfg.out_dir) / "grids");
            char name[64];
            std::snprintf(name, sizeof(name), "grids/eps_%+.4f.csv", eps);
            emit_section_grid(rd, fps, (fs::path(cfg.out_dir) / name).string());
        }
        ReductionReport red = verify_reduction(cfg, eps);
        if (red.zoll_vacuous)
            std::printf("  reduction: vacuous (P = id)\n");
        else
            std::printf(
                "  reduction: min-branch int sigma %.3e witness %d (sigma %.3e, period-id "
                "%.2e); max-branch int sigma %.3e witness %d (sigma %.3e, period-id %.2e)\n",
                red.min_int_sigma, (int)red.min_witness_found, red.min_witness_sigma,
                red.min_witness_period_residual, red.max_int_sigma,
                (int)red.max_witness_found, red.max_witness_sigma,
                red.max_witness_period_residual);
    }
    return 0;
}

int cmd_discmap(const CommonOpts& o) {
    ExperimentConfig cfg = make_config(o);
    if (!cfg.dm_g_spec.empty()) {
        SingleGReport r = single_g_suite(cfg);
        std::printf("g_spec: ||G||_V %.4e | roundtrip %.3e | HJ %.3e | QA drift %.3e\n",
                    r.vnorm, r.roundtrip_g, r.hj, r.qa_drift);
        std::printf("CAL (sigma route) %.9e | CAL (H route) %.9e | witness %d (sigma %.3e)\n",
                    r.cal_from_sigma, r.cal_from_h, (int)r.witness_ok, r.witness_sigma);
        return 0;
    }
    DiscmapSuiteReport rep = discmap_suite(cfg);
    int ok = 0;
    for (const auto& t : rep.trials) ok += t.witness_ok;
    std::printf("trials %zu | roundtrip G %.3e | roundtrip map %.3e | HJ %.3e\n",
                rep.trials.size(), rep.worst_roundtrip_g, rep.worst_roundtrip_map,
                rep.worst_hj);
    std::printf("QA drift %.3e | QA value %.3e | calabi consistency %.3e\n",
                rep.worst_qa_drift, rep.worst_qa_value, rep.worst_cal_difference);
    std::printf("witnesses: negative branch %d, positive branch %d of %zu\n",
                rep.witness_negative_branch, rep.witness_positive_branch, rep.trials.size());
    std::printf("rotation family: sigma residual %.3e, calabi residual %.3e\n",
                rep.rotation_sigma_residual, rep.rotation_cal_residual);
    if (!cfg.out_dir.empty()) emit_discmap_suite(rep, cfg, cfg.out_dir);
    (void)ok;
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    ExperimentConfig cfg = make_config(o);
    auto recs = run_sweep(cfg);
    print_records(recs);
    if (!cfg.out_dir.empty()) emit_records(recs, cfg, cfg.out_dir);
    return exit_code_for(recs);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reeblab: Reeb dynamics near Zoll contact forms on S^3 and lens spaces"};
    app.require_subcommand(1);

    CommonOpts o_ratio, o_orbits, o_section, o_discmap, o_sweep;
    auto* ratio = app.add_subcommand("ratio", "systolic/diastolic ratios per amplitude");
    add_common(ratio, o_ratio);
    auto* orbits = app.add_subcommand("orbits", "class-h periodic orbit census");
    add_common(orbits, o_orbits);
    auto* section = app.add_subcommand("section", "surface-of-section identity suite");
    add_common(section, o_section);
    auto* discmap = app.add_subcommand("discmap", "randomized generating-function suite");
    add_common(discmap, o_discmap);
    auto* sweep = app.add_subcommand("sweep", "full sweep with records.csv/summary.json");
    add_common(sweep, o_sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ratio->parsed()) return cmd_ratio(o_ratio);
        if (orbits->parsed()) return cmd_orbits(o_orbits);
        if (section->parsed()) return cmd_section(o_section);
        if (discmap->parsed()) return cmd_discmap(o_discmap);
        if (sweep->parsed()) return cmd_sweep(o_sweep);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
