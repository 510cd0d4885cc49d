#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cfiot::lmmse {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

// Detected-set split of the true active set, by device index.
struct ActivityPartition {
    std::vector<int> detected;      // declared active
    std::vector<int> missed;        // active but declared inactive
    std::vector<int> false_alarms;  // subset of detected that is inactive
};

// Z_hat = I + E * sum_{k in set} beta_k psi_k psi_k^H  (tau x tau, SPD).
MatrixXcd build_covariance(const MatrixXcd& pilots, const VectorXd& betas,
                           const std::vector<int>& index_set, double energy);

// Per-device LMMSE re-estimation against the detected support: row k of the
// result is sqrt(E) beta_k psi_k^H Z_hat^{-1} Y for detected devices and zero
// otherwise. Output is K x N.
MatrixXcd lmmse_estimate(const MatrixXcd& pilots, const VectorXd& betas,
                         const std::vector<int>& detected,
                         const MatrixXcd& received, double energy);

struct MseBreakdown {
    double error = 0.0;   // mean |g - g_hat|^2 per detected device entry
    double energy = 0.0;  // mean |g_hat|^2 per detected device entry
};

// Averages over the detected rows only (the estimator is zero elsewhere).
MseBreakdown empirical_channel_mse(const MatrixXcd& channels,
                                   const MatrixXcd& estimates,
                                   const std::vector<int>& detected);

}  // namespace cfiot::lmmse
