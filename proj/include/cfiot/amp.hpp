#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfiot/rng.hpp"

namespace cfiot::amp {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct DenoiserStats {
    double mu = 0.0;   // energy-based activity test statistic
    double nu = 0.0;   // threshold log(1 + beta/theta)
    double phi = 0.0;  // posterior activity weight
    double xi = 0.0;   // shrinkage factor phi*beta/(beta+theta)
};

// Posterior statistics of the simplified MMSE denoiser for one device.
// epsilon = 0 or 1 are taken as the phi = 0 / phi = 1 limits.
DenoiserStats denoiser_stats(double xhat_sq_norm, int n_antennas, double beta,
                             double theta, double epsilon);

// eta(xhat) = xi * xhat.
VectorXcd denoise(const VectorXcd& xhat, double beta, double theta,
                  double epsilon, DenoiserStats* stats = nullptr);

// Wirtinger Jacobian d eta_i / d xhat_j = xi I + c xhat xhat^H with
// c = a phi (1-phi) beta/(beta+theta), a = 1/theta - 1/(beta+theta).
Eigen::MatrixXcd denoiser_jacobian(const VectorXcd& xhat, double beta,
                                   double theta, double epsilon);

// theta_0 = 1/E + (epsilon/tau) * sum_k beta_k.
double state_evolution_init(double energy, double epsilon,
                            const VectorXd& betas, double tau);

// One scalar state-evolution step. The per-device expectation over
// (X, V) is evaluated by Monte Carlo with mc_samples draws per device;
// device_count rescales a representative beta sample to the full |D_m|.
double state_evolution_step(double theta, double energy, double epsilon,
                            const VectorXd& betas, double device_count,
                            double tau, int n_antennas, int mc_samples,
                            Rng& rng);

struct SeOptions {
    int mc_samples = 1000;
    int max_iters = 50;
    double rel_tol = 1e-4;
};

// thetas[t] for t = 0..iterations (no early stop); length iterations+1.
std::vector<double> state_evolution_schedule(double energy, double epsilon,
                                             const VectorXd& betas,
                                             double device_count, double tau,
                                             int n_antennas, int iterations,
                                             int mc_samples, Rng& rng);

// Iterates until |theta_{t+1}-theta_t|/theta_t < rel_tol; returns the last value.
double state_evolution_fixed_point(double energy, double epsilon,
                                   const VectorXd& betas, double device_count,
                                   double tau, int n_antennas,
                                   const SeOptions& opts, Rng& rng);

struct AmpOptions {
    int iterations = 10;
    bool online_theta = false;  // estimate theta_t = ||R||_F^2/(tau N) instead
    bool keep_history = false;  // record xhat and theta at every iteration
};

struct AmpResult {
    MatrixXcd xhat;              // |D_m| x N, row k = final pseudo-observation
    VectorXd mu;                 // per-device statistic at the final iterate
    VectorXd nu;                 // per-device threshold at the final iterate
    double theta = 0.0;          // theta used for the final statistics
    std::vector<double> theta_trace;      // theta_t actually applied
    std::vector<double> residual_trace;   // ||R_t||_F^2/(tau N)
    std::vector<MatrixXcd> xhat_history;  // filled when keep_history
};

// Per-AP vector AMP on Y (tau x N). Internally works on Y/sqrt(E).
// theta_schedule must supply thetas[0..iterations] unless online_theta.
AmpResult amp_run(const MatrixXcd& received, const MatrixXcd& pilots,
                  const VectorXd& betas, double energy, double epsilon,
                  const std::vector<double>& theta_schedule,
                  const AmpOptions& opts = {});

}  // namespace cfiot::amp
