#include "reeblab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "reeblab/errors.hpp"
#include "reeblab/numerics.hpp"

namespace reeblab {

using nlohmann::json;

Poly ExperimentConfig::perturbation() const {
    if (generator != "custom") return named_generator(generator);
    Poly f;
    for (const auto& [coef, mono] : custom_terms) {
        std::array<uint8_t, 4> e{};
        for (int i = 0; i < 4; ++i) {
            if (mono[i] < 0 || mono[i] > 8)
                throw ConfigError("custom term exponent out of range [0,8]");
            e[i] = uint8_t(mono[i]);
        }
        f += Poly::monomial(e, coef);
    }
    return f;
}

namespace {

void require_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown config key: " + path + it.key());
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    ExperimentConfig c;
    require_keys(j, "", {"p", "generator", "custom_terms", "eps", "integrator", "orbits",
                         "volume", "section", "section_loops", "eps_max", "margin_factor",
                         "discmap", "seed", "out"});
    if (j.contains("p")) c.p = j["p"].get<int>();
    if (j.contains("generator")) c.generator = j["generator"].get<std::string>();
    if (j.contains("custom_terms")) {
        for (const auto& t : j["custom_terms"]) {
            require_keys(t, "custom_terms.", {"coef", "monomial"});
            std::array<int, 4> mono{};
            auto mv = t.at("monomial");
            if (mv.size() != 4) throw ConfigError("custom term monomial must have 4 exponents");
            for (int i = 0; i < 4; ++i) mono[i] = mv[i].get<int>();
            c.custom_terms.emplace_back(t.at("coef").get<double>(), mono);
        }
    }
    if (j.contains("eps")) c.eps = j["eps"].get<std::vector<double>>();
    if (j.contains("integrator")) {
        const auto& ji = j["integrator"];
        require_keys(ji, "integrator.", {"rel_tol", "abs_tol", "max_step"});
        if (ji.contains("rel_tol")) c.integ.rel_tol = ji["rel_tol"].get<double>();
        if (ji.contains("abs_tol")) c.integ.abs_tol = ji["abs_tol"].get<double>();
        if (ji.contains("max_step")) c.integ.max_step = ji["max_step"].get<double>();
    }
    if (j.contains("orbits")) {
        const auto& jo = j["orbits"];
        require_keys(jo, "orbits.",
                     {"t_cap", "seed_radii", "seed_angles", "newton_tol", "dedup_tol"});
        if (jo.contains("t_cap")) c.orbits.t_cap = jo["t_cap"].get<double>();
        if (jo.contains("seed_radii")) c.orbits.seed_radii = jo["seed_radii"].get<int>();
        if (jo.contains("seed_angles")) c.orbits.seed_angles = jo["seed_angles"].get<int>();
        if (jo.contains("newton_tol")) c.orbits.newton_tol = jo["newton_tol"].get<double>();
        if (jo.contains("dedup_tol")) c.orbits.dedup_tol = jo["dedup_tol"].get<double>();
    }
    if (j.contains("volume")) {
        const auto& jv = j["volume"];
        require_keys(jv, "volume.", {"n_u", "n_angle"});
        if (jv.contains("n_u")) c.volume.n_u = jv["n_u"].get<int>();
        if (jv.contains("n_angle")) c.volume.n_angle = jv["n_angle"].get<int>();
    }
    if (j.contains("section")) {
        const auto& js = j["section"];
        require_keys(js, "section.", {"n_r", "n_theta", "n_s", "n_phi", "collar_split"});
        if (js.contains("n_r")) c.section.n_r = js["n_r"].get<int>();
        if (js.contains("n_theta")) c.section.n_theta = js["n_theta"].get<int>();
        if (js.contains("n_s")) c.section.n_s = js["n_s"].get<int>();
        if (js.contains("n_phi")) c.section.n_phi = js["n_phi"].get<int>();
        if (js.contains("collar_split")) c.section.collar_split = js["collar_split"].get<double>();
    }
    if (j.contains("section_loops")) c.section_loops = j["section_loops"].get<int>();
    if (j.contains("eps_max")) c.eps_max = j["eps_max"].get<double>();
    if (j.contains("margin_factor")) c.margin_factor = j["margin_factor"].get<double>();
    if (j.contains("discmap")) {
        const auto& jd = j["discmap"];
        require_keys(jd, "discmap.", {"trials", "vnorm", "delta_max", "c1_ball", "n_rho",
                                      "n_theta", "n_t", "g_spec"});
        if (jd.contains("trials")) c.dm_trials = jd["trials"].get<int>();
        if (jd.contains("vnorm")) c.dm_vnorm = jd["vnorm"].get<double>();
        if (jd.contains("delta_max")) c.dm_delta_max = jd["delta_max"].get<double>();
        if (jd.contains("c1_ball")) c.dm_c1_ball = jd["c1_ball"].get<double>();
        if (jd.contains("n_rho")) c.dm_n_rho = jd["n_rho"].get<int>();
        if (jd.contains("n_theta")) c.dm_n_theta = jd["n_theta"].get<int>();
        if (jd.contains("n_t")) c.dm_n_t = jd["n_t"].get<int>();
        if (jd.contains("g_spec")) {
            // closed-form generating function: radial polynomial in v = r^2
            // plus Fourier terms, every term with a core coefficient list
            const auto& js = jd["g_spec"];
            require_keys(js, "discmap.g_spec.", {"radial", "terms"});
            if (js.contains("radial")) {
                VFunction::Term t;
                t.core = js["radial"].get<std::vector<double>>();
                c.dm_g_spec.push_back(t);
            }
            if (js.contains("terms")) {
                for (const auto& jt : js["terms"]) {
                    require_keys(jt, "discmap.g_spec.terms.", {"m", "sin", "core"});
                    VFunction::Term t;
                    t.m = jt.at("m").get<int>();
                    t.is_sin = jt.contains("sin") && jt["sin"].get<bool>();
                    t.core = jt.at("core").get<std::vector<double>>();
                    t.cut = t.m != 0;
                    if (t.m < 0 || t.m > 16)
                        throw ConfigError("g_spec term frequency out of range [0,16]");
                    c.dm_g_spec.push_back(t);
                }
            }
        }
    }
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();

    // invariants
    if (c.p < 1) throw ConfigError("p must be >= 1");
    if (!(c.integ.rel_tol > 0 && c.integ.abs_tol > 0 && c.integ.max_step > 0))
        throw ConfigError("integrator tolerances must be positive");
    if (!(c.orbits.t_cap > 1.0 && c.orbits.t_cap < 2.0))
        throw ConfigError("orbits.t_cap must lie in (1,2)");
    for (double e : c.eps)
        if (!std::isfinite(e) || std::abs(e) > 0.5)
            throw ConfigError("eps amplitudes must be finite and |eps| <= 0.5");
    c.orbits.integ = c.integ;
    c.section.integ = c.integ;

    // deck invariance of custom perturbations on lens spaces
    if (c.p >= 2 && c.generator == "custom") {
        Poly f = c.perturbation();
        auto pts = SpherePoints::generate(32);
        for (const auto& p : pts) {
            Vec4 q{{p[0], p[1], p[2], p[3]}};
            Vec4 dq = phase_mul(q, 1.0 / c.p);
            if (std::abs(f.eval(q) - f.eval(dq)) > 1e-10)
                throw ConfigError("custom perturbation is not deck invariant for p = " +
                                  std::to_string(c.p));
        }
    }
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["p"] = c.p;
    j["generator"] = c.generator;
    if (!c.custom_terms.empty()) {
        json terms = json::array();
        for (const auto& [coef, mono] : c.custom_terms)
            terms.push_back({{"coef", coef}, {"monomial", mono}});
        j["custom_terms"] = terms;
    }
    j["eps"] = c.eps;
    j["integrator"] = {{"rel_tol", c.integ.rel_tol},
                       {"abs_tol", c.integ.abs_tol},
                       {"max_step", c.integ.max_step}};
    j["orbits"] = {{"t_cap", c.orbits.t_cap},
                   {"seed_radii", c.orbits.seed_radii},
                   {"seed_angles", c.orbits.seed_angles},
                   {"newton_tol", c.orbits.newton_tol},
                   {"dedup_tol", c.orbits.dedup_tol}};
    j["volume"] = {{"n_u", c.volume.n_u}, {"n_angle", c.volume.n_angle}};
    j["section"] = {{"n_r", c.section.n_r},
                    {"n_theta", c.section.n_theta},
                    {"n_s", c.section.n_s},
                    {"n_phi", c.section.n_phi},
                    {"collar_split", c.section.collar_split}};
    j["section_loops"] = c.section_loops;
    j["eps_max"] = c.eps_max;
    j["margin_factor"] = c.margin_factor;
    j["discmap"] = {{"trials", c.dm_trials},   {"vnorm", c.dm_vnorm},
                    {"delta_max", c.dm_delta_max}, {"c1_ball", c.dm_c1_ball},
                    {"n_rho", c.dm_n_rho},     {"n_theta", c.dm_n_theta},
                    {"n_t", c.dm_n_t}};
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    return j.dump(2);
}

namespace {

struct SectionOutputs {
    std::optional<ReturnData> rd;
    std::vector<FixedPointRecord> fps;
    bool all_fixed = false;  // Zoll case: P = id, every node is a fixed point
};

ResultRecord sweep_point(const ExperimentConfig& cfg, double eps, SectionOutputs* grids) {
    ResultRecord rec;
    rec.eps = eps;
    rec.inv_t_sigma = 1.0 / cfg.p;

    ContactForm zoll = zoll_form(cfg.p);
    ContactForm alpha = (eps == 0.0) ? zoll : perturbed_form(cfg.p, cfg.perturbation(), eps);
    rec.c3_distance = c3_minus_distance(alpha, zoll);

    if (rec.c3_distance > cfg.eps_max) {
        // warning-level guard, not an error: no verdict on the theorem
        rec.verdict = "out_of_regime";
        rec.note = "warning: c3 distance above the eps_max threshold";
        return rec;
    }

    rec.vol = contact_volume(alpha, cfg.volume);
    // quadrature error estimate by comparison with a coarser rule
    VolumeOptions half = cfg.volume;
    half.n_u = std::max(8, cfg.volume.n_u / 2);
    half.n_angle = std::max(8, cfg.volume.n_angle / 2);
    double vol_half = contact_volume(alpha, half);
    rec.est_error = 20.0 * std::max(cfg.integ.rel_tol, cfg.integ.abs_tol) +
                    std::abs(rec.vol - vol_half) / std::max(rec.vol, 1.0);

    OrbitSearchConfig ocfg = cfg.orbits;
    ocfg.integ = cfg.integ;
    auto census = find_orbits(alpha, ocfg);
    rec.orbit_count = (int)census.orbits.size();
    auto [tmin, tmax] = t_min_max(census.orbits);
    rec.t_min = tmin;
    rec.t_max = tmax;
    rec.rho_sys = tmin * tmin / rec.vol;
    rec.rho_dia = tmax * tmax / rec.vol;

    // section identities (p = 1 embedding) at a circular class-h orbit
    if (cfg.p == 1) {
        std::vector<const PeriodicOrbit*> ordered;
        for (const auto& o : census.orbits)
            if (o.class_h) ordered.push_back(&o);
        std::sort(ordered.begin(), ordered.end(),
                  [](const PeriodicOrbit* a, const PeriodicOrbit* b) {
                      return a->period < b->period;
                  });
        std::optional<NormalizedForm> nf;
        for (const PeriodicOrbit* o : ordered) {
            NormalizedForm cand = normalize(alpha, *o, cfg.integ);
            if (cand.circular && cand.fiber_closure < 1e-8) {
                nf = std::move(cand);
                break;
            }
        }
        if (nf) {
            ReturnData rd = return_map(nf->form, cfg.section);
            rd.T_ref = 1.0;
            double voln = rec.vol / (nf->T_ref * nf->T_ref);
            rec.res_volume = std::abs(voln - rd.integral_tau_dlambda()) / voln;
            rec.res_boundary = boundary_identity_residual(rd);
            rec.res_exactness = exactness_nodal_residual(rd);
            CalabiReport cal = action_and_calabi(rd, voln);
            rec.cal = nf->T_ref * nf->T_ref * cal.cal_normalized;
            rec.res_calabi =
                std::abs(rec.vol - 2.0 * rec.cal - cfg.p * nf->T_ref * nf->T_ref) / rec.vol;
            if (cfg.section_loops > 0)
                rec.res_loops = loop_exactness_residual(nf->form, cfg.section_loops,
                                                        cfg.seed ^ 0x10c5, cfg.integ);
            if (grids) {
                auto [dp, dt] = zoll_return_deviation(rd);
                (void)dt;
                if (dp < 1e-8)
                    grids->all_fixed = true;  // P = id: skip the enumeration
                else
                    grids->fps = fixed_point_orbit_check(rd, nf->form);
                grids->rd = std::move(rd);
            }
        } else {
            rec.note += "no circular normalising orbit; section identities skipped";
        }
    }

    const double tol = cfg.margin_factor * rec.est_error;
    const double inv_t = rec.inv_t_sigma;
    if (rec.rho_sys > inv_t + tol || rec.rho_dia < inv_t - tol) {
        rec.verdict = "violation";
    } else if (rec.rho_sys < inv_t - tol && rec.rho_dia > inv_t + tol) {
        rec.verdict = "strict_inequality";
    } else if (std::abs(rec.rho_sys - inv_t) <= std::max(tol, 1e-6) &&
               std::abs(rec.rho_dia - inv_t) <= std::max(tol, 1e-6)) {
        rec.verdict = "zoll_equality";
    } else {
        rec.verdict = "out_of_regime";
        rec.note += "indeterminate margins";
    }
    return rec;
}

} // namespace

std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg) {
    std::vector<ResultRecord> out(cfg.eps.size());
    std::vector<SectionOutputs> grids(cfg.eps.size());
    std::vector<std::future<ResultRecord>> jobs;
    jobs.reserve(cfg.eps.size());
    bool want_grids = !cfg.out_dir.empty();
    for (size_t i = 0; i < cfg.eps.size(); ++i) {
        jobs.push_back(std::async(std::launch::async, [&, i] {
            return sweep_point(cfg, cfg.eps[i], want_grids ? &grids[i] : nullptr);
        }));
    }
    for (size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();

    if (want_grids) {
        namespace fs = std::filesystem;
        fs::create_directories(fs::path(cfg.out_dir) / "grids");
        for (size_t i = 0; i < out.size(); ++i) {
            if (!grids[i].rd) continue;
            char name[64];
            std::snprintf(name, sizeof(name), "grids/eps_%+.4f.csv", cfg.eps[i]);
            emit_section_grid(*grids[i].rd, grids[i].fps,
                              (fs::path(cfg.out_dir) / name).string(), grids[i].all_fixed);
        }
    }
    return out;
}

ReductionReport verify_reduction(const ExperimentConfig& cfg, double eps) {
    if (cfg.p != 1) throw ConfigError("verify_reduction: section machinery requires p = 1");
    ReductionReport rep;
    ContactForm alpha =
        (eps == 0.0) ? zoll_form(1) : perturbed_form(1, cfg.perturbation(), eps);
    OrbitSearchConfig ocfg = cfg.orbits;
    ocfg.integ = cfg.integ;
    auto census = find_orbits(alpha, ocfg);
    auto [tmin, tmax] = t_min_max(census.orbits);
    if (tmax - tmin < 1e-9) {
        rep.zoll_vacuous = true;  // P = id, nothing to witness
        rep.note = "all class-h periods coincide";
        return rep;
    }
    const PeriodicOrbit *omin = nullptr, *omax = nullptr;
    for (const auto& o : census.orbits) {
        if (!o.class_h) continue;
        if (!omin || o.period < omin->period) omin = &o;
        if (!omax || o.period > omax->period) omax = &o;
    }

    auto branch = [&](const PeriodicOrbit& gamma, bool expect_positive, double& int_sigma,
                      bool& found, double& wsigma, double& wperiod_res) {
        NormalizedForm nf = normalize(alpha, gamma, cfg.integ);
        if (!nf.circular) rep.note += "non-circular normalising orbit (gamma(0) moved only); ";
        ReturnData rd = return_map(nf.form, cfg.section);
        int_sigma = rd.integral_sigma_dlambda();
        auto fps = fixed_point_orbit_check(rd, nf.form);
        for (const auto& fp : fps) {
            if (expect_positive ? (fp.sigma > 1e-9) : (fp.sigma < -1e-9)) {
                if (!found || std::abs(fp.sigma) > std::abs(wsigma)) {
                    found = true;
                    wsigma = fp.sigma;
                    wperiod_res = fp.period_residual;
                }
            }
        }
    };
    branch(*omin, true, rep.min_int_sigma, rep.min_witness_found, rep.min_witness_sigma,
           rep.min_witness_period_residual);
    branch(*omax, false, rep.max_int_sigma, rep.max_witness_found, rep.max_witness_sigma,
           rep.max_witness_period_residual);
    return rep;
}

DiscmapSuiteReport discmap_suite(const ExperimentConfig& cfg) {
    DiscmapSuiteReport rep;
    DiscModel disc(cfg.p);
    auto grid = std::make_shared<DiscGrid>(disc, cfg.dm_n_rho, cfg.dm_n_theta);

    // closed-form rotation family
    {
        double e = 0.01;
        double k = disc.t_sigma;
        VFunction rot = VFunction::radial(disc, {0.5 * e});
        ExactDiscMap phi = map_from_gen(rot);
        double worst = 0;
        for (int i = 0; i < grid->n_rho(); ++i)
            worst = std::max(worst,
                             std::abs(phi.sigma(grid->rho[i], 0.2) - e * k));
        rep.rotation_sigma_residual = worst;
        rep.rotation_cal_residual = std::abs(calabi(phi, *grid) - 0.5 * k * k * e);
    }

    for (int trial = 0; trial < cfg.dm_trials; ++trial) {
        DiscmapTrial t;
        t.seed = cfg.seed + trial;
        VFunction G = VFunction::random(disc, t.seed, cfg.dm_vnorm);
        t.vnorm = G.vnorm();
        if (t.vnorm > cfg.dm_delta_max)
            throw ConfigError("discmap trial exceeds the admissibility threshold");
        ExactDiscMap phi = map_from_gen(G);

        auto gv = gen_from_map(phi, *grid);
        double worst = 0;
        for (int i = 0; i < grid->n_rho(); ++i)
            for (int j = 0; j < grid->n_theta; ++j)
                worst = std::max(worst, std::abs(gv[grid->idx(i, j)] -
                                                 G.value(grid->rho[i], grid->theta(j))));
        t.roundtrip_g = worst;

        GenFunction gn = gen_function_of_map(phi);
        ExactDiscMap phi2 = map_from_gen(gn);
        double dmap = 0;
        for (int i = 0; i < 23; ++i) {
            double r = disc.a_max * i / 23.0;
            for (int j = 0; j < 9; ++j) {
                double th = (j + 0.37) / 9.0;
                auto [R1, T1] = phi.apply(r, th);
                auto [R2, T2] = phi2.apply(r, th);
                double dw = std::abs(disc.w_of_collar(R1, T1) - disc.w_of_collar(R2, T2));
                dmap = std::max({dmap, dw, std::abs(R1 - R2)});
            }
        }
        t.roundtrip_map = dmap;

        HamiltonianPath path = hamiltonian_of_path(G, cfg.dm_n_t, 24, 32);
        t.hj = hj_residual(path);
        QAReport qa = quasi_autonomous_path(G, path);
        t.qa_drift = std::max(qa.drift_min, qa.drift_max);
        t.qa_value_dev = std::max(qa.value_dev_min, qa.value_dev_max);
        CalabiValues cv = calabi_both(phi, path);
        t.cal_difference = cv.difference;

        double cal = calabi(phi, *grid);
        VFunction gw = (cal <= 0) ? G : G.scaled(-1.0);
        ExactDiscMap pw = (cal <= 0) ? phi : map_from_gen(gw);
        double cw = (cal <= 0) ? cal : calabi(pw, *grid);
        try {
            WitnessPoint w = sign_witness(gw, pw, *grid, cw);
            t.witness_ok = true;
            t.witness_sigma = w.sigma_value;
            ++rep.witness_negative_branch;
        } catch (const WitnessNotFound&) {
            t.witness_ok = false;
        }
        // mirrored branch
        try {
            VFunction gp = gw.scaled(-1.0);
            ExactDiscMap pp = map_from_gen(gp);
            WitnessPoint w = sign_witness(gp, pp, *grid, -cw);
            if (w.sigma_value > 0) ++rep.witness_positive_branch;
        } catch (const WitnessNotFound&) {
        }

        rep.worst_roundtrip_g = std::max(rep.worst_roundtrip_g, t.roundtrip_g);
        rep.worst_roundtrip_map = std::max(rep.worst_roundtrip_map, t.roundtrip_map);
        rep.worst_hj = std::max(rep.worst_hj, t.hj);
        rep.worst_qa_drift = std::max(rep.worst_qa_drift, t.qa_drift);
        rep.worst_qa_value = std::max(rep.worst_qa_value, t.qa_value_dev);
        rep.worst_cal_difference = std::max(rep.worst_cal_difference, t.cal_difference);
        rep.trials.push_back(t);
    }
    return rep;
}

namespace {
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
} // namespace

void emit_records(const std::vector<ResultRecord>& records, const ExperimentConfig& cfg,
                  const std::string& dir) {
    if (records.empty()) throw IoError("emit: empty record set");
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream csv(fs::path(dir) / "records.csv");
    if (!csv) throw IoError("emit: cannot write records.csv");
    csv << "eps,t_min,t_max,vol,rho_sys,rho_dia,inv_t_sigma,cal,res_exactness,"
           "res_boundary,res_volume,res_calabi,res_loops,c3_distance,est_error,"
           "orbit_count,verdict\n";
    for (const auto& r : records) {
        csv << fmt(r.eps) << ',' << fmt(r.t_min) << ',' << fmt(r.t_max) << ',' << fmt(r.vol)
            << ',' << fmt(r.rho_sys) << ',' << fmt(r.rho_dia) << ',' << fmt(r.inv_t_sigma)
            << ',' << fmt(r.cal) << ',' << fmt(r.res_exactness) << ',' << fmt(r.res_boundary)
            << ',' << fmt(r.res_volume) << ',' << fmt(r.res_calabi) << ',' << fmt(r.res_loops)
            << ',' << fmt(r.c3_distance) << ',' << fmt(r.est_error) << ',' << r.orbit_count
            << ',' << r.verdict << '\n';
    }
    json sum;
    sum["version"] = kVersion;
    sum["config"] = json::parse(config_to_json(cfg));
    json recs = json::array();
    for (const auto& r : records) {
        recs.push_back({{"eps", r.eps},
                        {"t_min", r.t_min},
                        {"t_max", r.t_max},
                        {"vol", r.vol},
                        {"rho_sys", r.rho_sys},
                        {"rho_dia", r.rho_dia},
                        {"inv_t_sigma", r.inv_t_sigma},
                        {"cal", r.cal},
                        {"res_exactness", r.res_exactness},
                        {"res_boundary", r.res_boundary},
                        {"res_volume", r.res_volume},
                        {"res_calabi", r.res_calabi},
                        {"res_loops", r.res_loops},
                        {"c3_distance", r.c3_distance},
                        {"est_error", r.est_error},
                        {"orbit_count", r.orbit_count},
                        {"verdict", r.verdict},
                        {"note", r.note}});
    }
    sum["records"] = recs;
    sum["exit_code"] = exit_code_for(records);
    std::ofstream js(fs::path(dir) / "summary.json");
    if (!js) throw IoError("emit: cannot write summary.json");
    js << sum.dump(2) << '\n';
}

void emit_discmap_suite(const DiscmapSuiteReport& rep, const ExperimentConfig& cfg,
                        const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream csv(fs::path(dir) / "discmap_trials.csv");
    if (!csv) throw IoError("emit: cannot write discmap_trials.csv");
    csv << "seed,vnorm,roundtrip_g,roundtrip_map,hj,qa_drift,qa_value_dev,"
           "cal_difference,witness_ok,witness_sigma\n";
    for (const auto& t : rep.trials) {
        csv << t.seed << ',' << fmt(t.vnorm) << ',' << fmt(t.roundtrip_g) << ','
            << fmt(t.roundtrip_map) << ',' << fmt(t.hj) << ',' << fmt(t.qa_drift) << ','
            << fmt(t.qa_value_dev) << ',' << fmt(t.cal_difference) << ','
            << (t.witness_ok ? 1 : 0) << ',' << fmt(t.witness_sigma) << '\n';
    }
    json sum;
    sum["version"] = kVersion;
    sum["config"] = json::parse(config_to_json(cfg));
    sum["witness_negative_branch"] = rep.witness_negative_branch;
    sum["witness_positive_branch"] = rep.witness_positive_branch;
    sum["worst_roundtrip_g"] = rep.worst_roundtrip_g;
    sum["worst_roundtrip_map"] = rep.worst_roundtrip_map;
    sum["worst_hj"] = rep.worst_hj;
    sum["worst_qa_drift"] = rep.worst_qa_drift;
    sum["worst_qa_value"] = rep.worst_qa_value;
    sum["worst_cal_difference"] = rep.worst_cal_difference;
    sum["rotation_sigma_residual"] = rep.rotation_sigma_residual;
    sum["rotation_cal_residual"] = rep.rotation_cal_residual;
    std::ofstream js(fs::path(dir) / "discmap_summary.json");
    js << sum.dump(2) << '\n';
}

void emit_section_grid(const ReturnData& rd, const std::vector<FixedPointRecord>& fps,
                       const std::string& path, bool all_fixed) {
    std::ofstream csv(path);
    if (!csv) throw IoError("emit: cannot write " + path);
    csv << "r,theta,tau,sigma,fixed_flag\n";
    auto fixed_near = [&](double r, double th) {
        if (all_fixed) return 1;
        Cplx w = rd.disc.w_of_collar(r, th);
        for (const auto& fp : fps)
            if (std::abs(fp.w - w) < 1e-3) return 1;
        return 0;
    };
    for (int i = 0; i < rd.cfg.n_r; ++i)
        for (int j = 0; j < rd.cfg.n_theta; ++j) {
            double r = rd.r_nodes[i], th = double(j) / rd.cfg.n_theta;
            double tau = rd.tau_c[rd.collar_index(i, j)];
            csv << fmt(r) << ',' << fmt(th) << ',' << fmt(tau) << ',' << fmt(tau - 1.0) << ','
                << fixed_near(r, th) << '\n';
        }
    for (int i = 0; i < rd.cfg.n_s; ++i)
        for (int j = 0; j < rd.cfg.n_phi; ++j) {
            Cplx w = std::polar(rd.s_nodes[i], kTwoPi * j / rd.cfg.n_phi);
            auto [r, th] = rd.disc.collar_of_w(w);
            double tau = rd.tau_k[rd.cap_index(i, j)];
            csv << fmt(r) << ',' << fmt(th) << ',' << fmt(tau) << ',' << fmt(tau - 1.0) << ','
                << fixed_near(r, th) << '\n';
        }
}

void write_vfunction_csv(const NodalField& f, const std::string& path) {
    std::ofstream csv(path);
    if (!csv) throw IoError("cannot write " + path);
    csv << "r,theta,value\n";
    const DiscGrid& g = *f.grid;
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta; ++j)
            csv << fmt(g.rho[i]) << ',' << fmt(g.theta(j)) << ',' << fmt(f.at(i, j)) << '\n';
}

NodalField read_vfunction_csv(const DiscGrid& grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    NodalField f(grid);
    std::vector<bool> seen(f.v.size(), false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double r, th, v;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &th, &v) != 3)
            throw IoError("malformed row in " + path);
        // locate the grid node
        int bi = 0;
        double bd = 1e300;
        for (int i = 0; i < grid.n_rho(); ++i)
            if (std::abs(grid.rho[i] - r) < bd) {
                bd = std::abs(grid.rho[i] - r);
                bi = i;
            }
        int bj = (int)std::lround(th * grid.n_theta);
        bj = ((bj % grid.n_theta) + grid.n_theta) % grid.n_theta;
        if (bd > 1e-9 || std::abs(grid.theta(bj) - th) > 1e-9)
            throw IoError("row does not match a grid node in " + path);
        f.at(bi, bj) = v;
        seen[grid.idx(bi, bj)] = true;
    }
    for (bool s : seen)
        if (!s) throw IoError("incomplete grid in " + path);
    return f;
}

SingleGReport single_g_suite(const ExperimentConfig& cfg) {
    if (cfg.dm_g_spec.empty()) throw ConfigError("single_g_suite: no g_spec in the config");
    DiscModel disc(cfg.p);
    auto grid = std::make_shared<DiscGrid>(disc, cfg.dm_n_rho, cfg.dm_n_theta);
    VFunction G(disc, cfg.dm_g_spec);
    SingleGReport rep;
    rep.vnorm = G.vnorm();
    if (rep.vnorm > cfg.dm_delta_max)
        throw ConfigError("g_spec exceeds the admissibility threshold ||G||_V < delta");
    ExactDiscMap phi = map_from_gen(G);
    auto gv = gen_from_map(phi, *grid);
    for (int i = 0; i < grid->n_rho(); ++i)
        for (int j = 0; j < grid->n_theta; ++j)
            rep.roundtrip_g = std::max(rep.roundtrip_g,
                                       std::abs(gv[grid->idx(i, j)] -
                                                G.value(grid->rho[i], grid->theta(j))));
    HamiltonianPath path = hamiltonian_of_path(G, cfg.dm_n_t, 24, 32);
    rep.hj = hj_residual(path);
    QAReport qa = quasi_autonomous_path(G, path);
    rep.qa_drift = std::max(qa.drift_min, qa.drift_max);
    CalabiValues cv = calabi_both(phi, path);
    rep.cal_from_sigma = cv.from_sigma;
    rep.cal_from_h = cv.from_h;
    try {
        WitnessPoint w = sign_witness(G, phi, *grid, cv.from_sigma);
        rep.witness_ok = true;
        rep.witness_sigma = w.sigma_value;
    } catch (const WitnessNotFound&) {
        rep.witness_ok = false;
    }
    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(fs::path(cfg.out_dir) / "grids");
        NodalField f(*grid);
        f.v = gv;
        write_vfunction_csv(f, (fs::path(cfg.out_dir) / "grids" / "g_roundtrip.csv").string());
    }
    return rep;
}

int exit_code_for(const std::vector<ResultRecord>& records) {
    bool oor = false;
    for (const auto& r : records) {
        if (r.verdict == "violation") return 3;
        if (r.verdict == "out_of_regime") oor = true;
    }
    return oor ? 2 : 0;
}

} // namespace reeblab
