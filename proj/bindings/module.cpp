#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reeblab/errors.hpp"
#include "reeblab/harness.hpp"

namespace py = pybind11;
using namespace reeblab;

namespace {

Vec4 to_vec4(const std::vector<double>& v) {
    if (v.size() != 4) throw py::value_error("expected a 4-vector");
    return Vec4{{v[0], v[1], v[2], v[3]}};
}

std::vector<double> from_vec4(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

py::dict orbit_dict(const PeriodicOrbit& o) {
    py::dict d;
    d["seed"] = from_vec4(o.seed.x);
    d["period"] = o.period;
    d["class_h"] = o.class_h;
    d["closure_residual"] = o.closure_residual;
    d["lift_winding"] = o.lift_winding;
    return d;
}

py::dict record_dict(const ResultRecord& r) {
    py::dict d;
    d["eps"] = r.eps;
    d["t_min"] = r.t_min;
    d["t_max"] = r.t_max;
    d["vol"] = r.vol;
    d["rho_sys"] = r.rho_sys;
    d["rho_dia"] = r.rho_dia;
    d["inv_t_sigma"] = r.inv_t_sigma;
    d["cal"] = r.cal;
    d["res_exactness"] = r.res_exactness;
    d["res_boundary"] = r.res_boundary;
    d["res_volume"] = r.res_volume;
    d["res_calabi"] = r.res_calabi;
    d["c3_distance"] = r.c3_distance;
    d["est_error"] = r.est_error;
    d["orbit_count"] = r.orbit_count;
    d["verdict"] = r.verdict;
    d["note"] = r.note;
    return d;
}

ContactForm make_form(int p, const std::string& generator, double eps) {
    if (eps == 0.0) return zoll_form(p);
    return perturbed_form(p, named_generator(generator), eps);
}

} // namespace

PYBIND11_MODULE(_reeblab, m) {
    m.doc() = "Reeb dynamics near Zoll contact forms on S^3 and lens spaces";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "ReeblabError");

    py::class_<ContactForm>(m, "ContactForm")
        .def_property_readonly("lens_order", [](const ContactForm& a) { return a.lens_order; })
        .def("eval",
             [](const ContactForm& a, const std::vector<double>& q, const std::vector<double>& v) {
                 return a.eval(to_vec4(q), to_vec4(v));
             })
        .def("d_eval", [](const ContactForm& a, const std::vector<double>& q,
                          const std::vector<double>& u, const std::vector<double>& v) {
            return a.d_eval(to_vec4(q), to_vec4(u), to_vec4(v));
        });

    m.def("zoll_form", &zoll_form, py::arg("p") = 1,
          "Zoll contact form of prime class-h period 1 on S^3 / L(p,1)");
    m.def("perturbed_form", &make_form, py::arg("p"), py::arg("generator"), py::arg("eps"),
          "(1 + eps f) * zoll form with a named generator (radial|resonant|mixed)");
    m.def("scaled_form", &scaled_form, py::arg("form"), py::arg("c"));

    m.def(
        "reeb_at",
        [](const ContactForm& a, const std::vector<double>& q) {
            return from_vec4(reeb_at(a, Point4(to_vec4(q), a.lens_order)));
        },
        py::arg("form"), py::arg("point"));
    m.def(
        "contact_volume",
        [](const ContactForm& a, int n_u, int n_angle) {
            VolumeOptions opt;
            opt.n_u = n_u;
            opt.n_angle = n_angle;
            return contact_volume(a, opt);
        },
        py::arg("form"), py::arg("n_u") = 64, py::arg("n_angle") = 64);
    m.def(
        "c3_distance",
        [](const ContactForm& a, const ContactForm& b) { return c3_minus_distance(a, b); },
        py::arg("a"), py::arg("b"));
    m.def(
        "integrate",
        [](const ContactForm& a, const std::vector<double>& q, double t, double tol) {
            IntegratorConfig cfg;
            cfg.rel_tol = cfg.abs_tol = tol;
            return from_vec4(integrate(a, Point4(to_vec4(q), a.lens_order), t, cfg).x);
        },
        py::arg("form"), py::arg("point"), py::arg("t"), py::arg("tol") = 1e-10);

    m.def(
        "find_orbits",
        [](const ContactForm& a, double t_cap, int seed_radii, int seed_angles) {
            OrbitSearchConfig cfg;
            cfg.t_cap = t_cap;
            cfg.seed_radii = seed_radii;
            cfg.seed_angles = seed_angles;
            auto res = find_orbits(a, cfg);
            py::list out;
            for (const auto& o : res.orbits) out.append(orbit_dict(o));
            return out;
        },
        py::arg("form"), py::arg("t_cap") = 1.5, py::arg("seed_radii") = 4,
        py::arg("seed_angles") = 6);

    m.def(
        "ratios",
        [](const ContactForm& a, double t_cap, int seed_radii, int seed_angles) {
            OrbitSearchConfig cfg;
            cfg.t_cap = t_cap;
            cfg.seed_radii = seed_radii;
            cfg.seed_angles = seed_angles;
            auto res = find_orbits(a, cfg);
            return ratios(a, res.orbits);
        },
        py::arg("form"), py::arg("t_cap") = 1.5, py::arg("seed_radii") = 4,
        py::arg("seed_angles") = 6,
        "(rho_sys, rho_dia) over the class-h orbit census");

    m.def(
        "section_suite",
        [](const std::string& generator, double eps, int n_r, int n_theta) {
            ExperimentConfig cfg;
            cfg.generator = generator;
            cfg.eps = {eps};
            cfg.section.n_r = n_r;
            cfg.section.n_theta = n_theta;
            cfg.section.n_s = std::max(8, n_r / 2);
            cfg.section.n_phi = std::max(12, n_theta / 2);
            cfg.orbits.seed_radii = 3;
            cfg.orbits.seed_angles = 4;
            auto recs = run_sweep(cfg);
            return record_dict(recs.at(0));
        },
        py::arg("generator"), py::arg("eps"), py::arg("n_r") = 24, py::arg("n_theta") = 32,
        "single-point sweep with the return-map identity residuals");

    m.def(
        "discmap_roundtrip",
        [](uint64_t seed, double vnorm, int n_rho, int n_theta) {
            DiscModel disc(1);
            auto grid = std::make_shared<DiscGrid>(disc, n_rho, n_theta);
            VFunction G = VFunction::random(disc, seed, vnorm);
            ExactDiscMap phi = map_from_gen(G);
            auto gv = gen_from_map(phi, *grid);
            double worst = 0;
            for (int i = 0; i < grid->n_rho(); ++i)
                for (int j = 0; j < grid->n_theta; ++j)
                    worst = std::max(worst, std::abs(gv[grid->idx(i, j)] -
                                                     G.value(grid->rho[i], grid->theta(j))));
            py::dict d;
            d["roundtrip_g"] = worst;
            d["calabi"] = calabi(phi, *grid);
            return d;
        },
        py::arg("seed"), py::arg("vnorm") = 0.01, py::arg("n_rho") = 32, py::arg("n_theta") = 32);

    m.def(
        "rotation_family",
        [](double eps, int k) {
            DiscModel disc(k);
            DiscGrid grid(disc, 32, 32);
            VFunction rot = VFunction::radial(disc, {0.5 * eps});
            ExactDiscMap phi = map_from_gen(rot);
            py::dict d;
            d["sigma"] = phi.sigma(0.5 * disc.a_max, 0.0);
            d["cal"] = calabi(phi, grid);
            return d;
        },
        py::arg("eps"), py::arg("k") = 1,
        "closed-form table: sigma = eps k, CAL = k^2 eps / 2");

    m.def(
        "run_sweep",
        [](const std::string& config_json) {
            ExperimentConfig cfg = parse_config(config_json);
            auto recs = run_sweep(cfg);
            py::list out;
            for (const auto& r : recs) out.append(record_dict(r));
            return out;
        },
        py::arg("config_json"), "full sweep from a JSON config string");
}
