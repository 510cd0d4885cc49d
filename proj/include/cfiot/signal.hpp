#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "cfiot/rng.hpp"

namespace cfiot::signal {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

// One complex Gaussian CN(0, variance) sample: two independent real
// Gaussians, each with half the complex variance.
std::complex<double> complex_gaussian(double variance, Rng& rng);

// tau x K pilot matrix; column k ~ CN(0, I/tau), so E||psi_k||^2 = 1.
MatrixXcd generate_pilots(int tau, int k_devices, Rng& rng);

// i.i.d. Bernoulli(epsilon) activity indicators.
std::vector<std::uint8_t> sample_activity(double epsilon, int k_devices, Rng& rng);

struct ApSignal {
    MatrixXcd channels;  // |D_m| x N, row k = g_{m,k}^T ~ CN(0, beta_k I)
    MatrixXcd sparse;    // |D_m| x N, row k = alpha_k g_{m,k}^T
    MatrixXcd received;  // tau x N, Y = sqrt(E) Psi X + W
};

// Per-AP received pilot matrix. `pilots` holds the columns for the AP's
// covered devices (tau x |D_m|), `betas` the matching path-loss gains.
// With noise disabled W = 0 (identity-test mode only).
ApSignal synthesize_received(const MatrixXcd& pilots, const VectorXd& betas,
                             const std::vector<std::uint8_t>& activity,
                             double energy, int n_antennas, Rng& rng,
                             bool noise_enabled = true);

}  // namespace cfiot::signal
