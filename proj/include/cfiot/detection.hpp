#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace cfiot::detection {

using Eigen::VectorXd;

// Fusing weights over a device's cooperating APs (indices into A~_k order).
// Weights are nonnegative and sum to 1.
struct FusionWeights {
    VectorXd weights;
};

FusionWeights weights_equal(int cooperating_ap_count);

// All weight on the strongest AP (ties -> lowest index).
FusionWeights weights_smallcell(const VectorXd& betas);

// Grid search of the Welch-Satterthwaite error probability over the
// probability simplex; the grid always contains the equal-weight point and
// every vertex, so the returned objective is <= both baselines.
// grid_resolution is the number of steps along each simplex edge (>= 2).
FusionWeights weights_optimal(const VectorXd& betas, const VectorXd& thetas,
                              int n_antennas, double epsilon,
                              int grid_resolution);

// alpha_hat = 1 iff sum(zeta*mu) >= sum(zeta*nu); equality decides active.
bool fuse_decide(const VectorXd& mu_per_ap, const VectorXd& nu_per_ap,
                 const FusionWeights& weights);

struct DetectionStats {
    std::optional<double> p_miss;
    std::optional<double> p_false;
    std::optional<double> p_error;  // eps*p_miss + (1-eps)*p_false
    long active_trials = 0;
    long inactive_trials = 0;
};

struct Trial {
    bool active;
    bool decided_active;
};

DetectionStats empirical_error_rates(const std::vector<Trial>& trials,
                                     double epsilon);

}  // namespace cfiot::detection
