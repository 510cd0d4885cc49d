#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cfiot::experiments {

// Simulation campaign settings. Derived quantities (noise floor, per-symbol
// SNR, pilot energy) are always recomputed from the physical fields.
struct ExperimentConfig {
    // physical
    double tx_power_dbm = 23.0;
    double bandwidth_hz = 20e6;
    double noise_psd_dbm_hz = -169.0;
    // geometry
    double lambda_a = 2.0;    // APs / km^2
    double lambda_d = 637.0;  // devices / km^2
    double r0_km = 2.0;
    double r1_km = 1.0;
    double window_km = 6.0;
    // protocol
    int tau = 100;
    double epsilon = 0.05;
    int n_antennas = 3;
    int amp_iterations = 10;
    // analysis
    double p0 = 0.02;
    std::string weight_strategy = "equal";  // equal | smallcell | optimal
    int grid_resolution = 20;
    bool mixed_inactive_scale = false;  // alternate inactive-scale formula
    // reference link used by the pipeline-level experiments: a single device
    // seen by a few APs at fixed distances, each AP loaded with a reduced
    // device population so the detector operates at desk scale.
    int ref_devices_per_ap = 200;
    std::vector<double> ref_ap_distances_km = {0.3, 0.7};
    int se_mc_samples = 2000;
    int se_profile_points = 200;  // gain-profile resolution for state evolution
    // trials
    int trials = 1000;
    int realizations = 200;
    std::uint64_t master_seed = 1;

    double noise_power_dbm() const;
    double rho() const;     // linear per-symbol SNR
    double energy() const;  // pilot energy E = tau * rho

    // Throws std::invalid_argument listing every violated invariant.
    void validate() const;
};

// Defaults when path is empty; otherwise parses a JSON file whose keys match
// the field names above. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
};

ExperimentConfig resolve_config(const std::string& path,
                                const CliOverrides& overrides);

// figure_id in {fig2..fig7}; writes one CSV to out_path.
void run_figure(const std::string& figure_id, const ExperimentConfig& config,
                const std::string& out_path);

// Coverage table at the configured antenna count: cell-free Monte Carlo for
// the configured weight strategy plus both closed-form baselines.
void run_coverage(const ExperimentConfig& config, const std::string& out_path);

// Small deterministic run (reduced trials) writing two CSVs under out_dir;
// used to check byte-level reproducibility.
void run_selftest(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace cfiot::experiments
