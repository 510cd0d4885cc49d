#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "cfiot/geometry.hpp"
#include "cfiot/rng.hpp"

namespace cfiot::analysis {

using Eigen::VectorXd;

// Welch-Satterthwaite Gamma approximation of the fused statistic
// sum_m zeta_m mu_m under the active / inactive hypotheses.
struct WsApprox {
    double s_active = 0.0;
    double omega_active = 0.0;
    double s_inactive = 0.0;
    double omega_inactive = 0.0;
    double nu_threshold = 0.0;  // sum_m zeta_m log(1 + beta_m/theta_m)
};

// Per-AP Gamma scales: vartheta = zeta*beta/(N*theta) (active),
// vartheta' = zeta*beta/(N*(theta+beta)) (inactive), then two-moment
// matching. With mixed_inactive_scale the inactive scale uses the active
// sum(vartheta^2) numerator instead of the moment-matched sum(vartheta'^2).
WsApprox ws_params(const VectorXd& betas, const VectorXd& thetas,
                   const VectorXd& weights, int n_antennas,
                   bool mixed_inactive_scale = false);

struct ErrorProbs {
    double p_miss = 0.0;
    double p_false = 0.0;
    double p_error = 0.0;
};

ErrorProbs detection_error_closed_form(const WsApprox& ws, double epsilon);

// Deterministic equivalents of tr(Z^-1)/tau and tr(Z^-2)/tau for
// Z = I + sum_i E beta_i psi_i psi_i^H.
struct DeterministicEquivalents {
    double q = 1.0;
    double q_bar = 1.0;
    VectorXd varsigma;      // fixed-point values, one per set element
    VectorXd varsigma_hat;  // solution of (I - J) varsigma_hat = r
};

DeterministicEquivalents deterministic_equivalents(const VectorXd& betas,
                                                   double energy, double tau);

// Asymptotic per-device channel estimation error (three-term closed form).
// beta_k: gain of the device (detected); detected_others: gains of the rest
// of the detected set; missed: gains of active-but-undetected devices;
// false_indices: positions in detected_others that are false detections.
double asymptotic_mse(double beta_k, const VectorXd& detected_others,
                      const VectorXd& missed,
                      const std::vector<int>& false_indices, double energy,
                      double tau);

// Root of the closed-form error-vs-beta curve and the induced coverage.
struct CoverageResult {
    double coverage = 0.0;
    double beta_root = 0.0;   // gain at which the error probability hits p0
    double radius_km = 0.0;   // corresponding distance
    bool boundary = false;    // no sign change: coverage clamped to 0 or 1
};

CoverageResult coverage_collocated(int n_antennas, double ap_equiv_count,
                                   double theta, double epsilon, double p0,
                                   const geometry::PathLossModel& model,
                                   double r0_km);

CoverageResult coverage_smallcell(int n_antennas, double theta, double epsilon,
                                  double p0, double lambda_a,
                                  const geometry::PathLossModel& model,
                                  double r0_km);

// Error probability when the fused statistic pools `shape` i.i.d. antenna
// observations at a single gain/noise level (collocated or nearest-AP case).
double pooled_error_probability(double shape, double theta, double beta,
                                double epsilon);

enum class WeightStrategy { equal, smallcell, optimal };

struct CoverageMcResult {
    double coverage = 0.0;
    double stderr_est = 0.0;
    int realizations = 0;
};

struct CoverageMcConfig {
    double lambda_a = 2.0;
    double r1_km = 1.0;
    int n_antennas = 3;
    double epsilon = 0.05;
    double theta = 0.0;  // converged state-evolution value for this N
    double p0 = 0.02;
    int grid_resolution = 20;  // for WeightStrategy::optimal
};

// Samples AP geometries around a typical device and evaluates the
// closed-form error probability; returns the fraction below p0.
CoverageMcResult coverage_cellfree_mc(const CoverageMcConfig& cfg,
                                      const geometry::PathLossModel& model,
                                      WeightStrategy strategy, int realizations,
                                      std::uint64_t seed);

// Deterministic area-quantile sample of the path-loss distribution over a
// disk of radius r0 (used as the representative D_m gain profile).
VectorXd quantile_betas(const geometry::PathLossModel& model, double r0_km,
                        int count);

}  // namespace cfiot::analysis
