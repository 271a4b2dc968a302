#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "reeblab/discmaps.hpp"
#include "reeblab/section.hpp"

namespace reeblab {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    int p = 1;
    std::string generator = "resonant";  // radial | resonant | mixed | custom
    std::vector<std::pair<double, std::array<int, 4>>> custom_terms;
    std::vector<double> eps{0.0, 0.01, 0.03, 0.05};

    IntegratorConfig integ{};
    OrbitSearchConfig orbits{};
    VolumeOptions volume{};
    ReturnGridConfig section{};
    int section_loops = 0;  // loop-exactness checks per sweep point (0 = skip)

    double eps_max = 0.1;         // c3-distance threshold -> out_of_regime
    double margin_factor = 10.0;  // verdict margin over the error estimate

    int dm_trials = 100;
    double dm_vnorm = 0.01;
    double dm_delta_max = 0.05;   // admissibility threshold on ||G||_V
    double dm_c1_ball = 0.05;     // C1 ball for maps fed to the G-operator
    int dm_n_rho = 40, dm_n_theta = 48, dm_n_t = 9;
    // optional closed-form G spec: radial polynomial in v = r^2 (profile
    // v * core(v)) plus Fourier-in-theta terms
    std::vector<VFunction::Term> dm_g_spec;

    uint64_t seed = 12345;
    std::string out_dir;

    Poly perturbation() const;
};

/// Parse a JSON config; unknown keys are rejected with a field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

struct ResultRecord {
    double eps = 0;
    double t_min = 0, t_max = 0;
    double vol = 0;
    double rho_sys = 0, rho_dia = 0;
    double inv_t_sigma = 0;
    double cal = 0;
    double res_exactness = -1, res_boundary = -1, res_volume = -1, res_calabi = -1;
    double res_loops = -1;
    double c3_distance = 0;
    double est_error = 0;
    int orbit_count = 0;
    std::string verdict;  // zoll_equality | strict_inequality | out_of_regime | violation
    std::string note;
};

std::vector<ResultRecord> run_sweep(const ExperimentConfig& cfg);

/// Reduction corollary checks at the extreme normalisations.
struct ReductionReport {
    bool zoll_vacuous = false;
    // minimal-period normalisation: int sigma dlambda >= 0 and a positive
    // witness whose orbit is longer than T_ref
    double min_int_sigma = 0;
    bool min_witness_found = false;
    double min_witness_sigma = 0;
    double min_witness_period_residual = 0;
    // maximal-period normalisation: mirrored
    double max_int_sigma = 0;
    bool max_witness_found = false;
    double max_witness_sigma = 0;
    double max_witness_period_residual = 0;
    std::string note;
};

ReductionReport verify_reduction(const ExperimentConfig& cfg, double eps);

struct DiscmapTrial {
    uint64_t seed = 0;
    double vnorm = 0;
    double roundtrip_g = 0;   // sup |G(E(G)) - G|
    double roundtrip_map = 0; // C0 distance of E(G(phi)) from phi
    double hj = 0;
    double qa_drift = 0;
    double qa_value_dev = 0;
    double cal_difference = 0;
    bool witness_ok = false;
    double witness_sigma = 0;
};

struct DiscmapSuiteReport {
    std::vector<DiscmapTrial> trials;
    int witness_negative_branch = 0;
    int witness_positive_branch = 0;
    double worst_roundtrip_g = 0, worst_roundtrip_map = 0, worst_hj = 0;
    double worst_qa_drift = 0, worst_qa_value = 0, worst_cal_difference = 0;
    // closed-form rotation family check
    double rotation_sigma_residual = 0;
    double rotation_cal_residual = 0;
};

DiscmapSuiteReport discmap_suite(const ExperimentConfig& cfg);

/// CSV / JSON emission.  Throws IoError on failure, and on empty record sets.
void emit_records(const std::vector<ResultRecord>& records, const ExperimentConfig& cfg,
                  const std::string& dir);
void emit_discmap_suite(const DiscmapSuiteReport& rep, const ExperimentConfig& cfg,
                        const std::string& dir);
/// Per-point section grid (r, theta, tau, sigma, fixed_flag) as CSV.
void emit_section_grid(const ReturnData& rd, const std::vector<FixedPointRecord>& fps,
                       const std::string& path, bool all_fixed = false);

/// Exit-code policy: 0 consistent, 2 out_of_regime present, 3 violation.
int exit_code_for(const std::vector<ResultRecord>& records);

/// VFunction grids as CSV with columns r, theta, value.
void write_vfunction_csv(const NodalField& f, const std::string& path);
NodalField read_vfunction_csv(const DiscGrid& grid, const std::string& path);

/// Single-G diagnostics for a closed-form spec from the config.
struct SingleGReport {
    double vnorm = 0;
    double roundtrip_g = 0;
    double hj = 0;
    double qa_drift = 0;
    double cal_from_sigma = 0, cal_from_h = 0;
    bool witness_ok = false;
    double witness_sigma = 0;
};
SingleGReport single_g_suite(const ExperimentConfig& cfg);

} // namespace reeblab
