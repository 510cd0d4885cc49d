#include "cfiot/detection.hpp"

#include <limits>
#include <stdexcept>

#include "cfiot/analysis.hpp"

namespace cfiot::detection {
namespace {

double ws_error(const VectorXd& betas, const VectorXd& thetas,
                const VectorXd& weights, int n_antennas, double epsilon) {
    const auto ws =
        analysis::ws_params(betas, thetas, weights, n_antennas);
    return analysis::detection_error_closed_form(ws, epsilon).p_error;
}

// Enumerates all compositions of `total` into `parts` nonnegative integers,
// invoking fn on each normalized weight vector.
void for_each_grid_point(int total, int parts,
                         const std::function<void(const VectorXd&)>& fn) {
    VectorXd w(parts);
    std::vector<int> counts(static_cast<std::size_t>(parts), 0);
    const std::function<void(int, int)> recurse = [&](int depth,
                                                      int remaining) {
        if (depth == parts - 1) {
            counts[static_cast<std::size_t>(depth)] = remaining;
            for (int i = 0; i < parts; ++i) {
                w[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) /
                       static_cast<double>(total);
            }
            fn(w);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(depth)] = c;
            recurse(depth + 1, remaining - c);
        }
    };
    recurse(0, total);
}

}  // namespace

FusionWeights weights_equal(int cooperating_ap_count) {
    if (cooperating_ap_count <= 0) {
        throw std::invalid_argument("weights_equal: need at least one AP");
    }
    return {VectorXd::Constant(cooperating_ap_count,
                               1.0 / cooperating_ap_count)};
}

FusionWeights weights_smallcell(const VectorXd& betas) {
    if (betas.size() == 0) {
        throw std::invalid_argument("weights_smallcell: empty gain vector");
    }
    Eigen::Index best = 0;
    betas.maxCoeff(&best);
    VectorXd w = VectorXd::Zero(betas.size());
    w[best] = 1.0;
    return {w};
}

FusionWeights weights_optimal(const VectorXd& betas, const VectorXd& thetas,
                              int n_antennas, double epsilon,
                              int grid_resolution) {
    const auto m = betas.size();
    if (m == 0 || thetas.size() != m) {
        throw std::invalid_argument("weights_optimal: inconsistent inputs");
    }
    if (grid_resolution < 2) {
        throw std::invalid_argument("weights_optimal: grid_resolution >= 2");
    }
    if (m == 1) return {VectorXd::Ones(1)};

    double best_err = std::numeric_limits<double>::infinity();
    VectorXd best_w;
    auto consider = [&](const VectorXd& w) {
        const double err = ws_error(betas, thetas, w, n_antennas, epsilon);
        if (err < best_err) {
            best_err = err;
            best_w = w;
        }
    };
    // Baselines first so they win ties and we never return worse than either.
    consider(VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
    for (Eigen::Index i = 0; i < m; ++i) {
        VectorXd w = VectorXd::Zero(m);
        w[i] = 1.0;
        consider(w);
    }
    for_each_grid_point(grid_resolution, static_cast<int>(m), consider);
    return {best_w};
}

bool fuse_decide(const VectorXd& mu_per_ap, const VectorXd& nu_per_ap,
                 const FusionWeights& weights) {
    const auto& w = weights.weights;
    if (mu_per_ap.size() != w.size() || nu_per_ap.size() != w.size()) {
        throw std::invalid_argument("fuse_decide: size mismatch");
    }
    return w.dot(mu_per_ap) >= w.dot(nu_per_ap);
}

DetectionStats empirical_error_rates(const std::vector<Trial>& trials,
                                     double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::domain_error("empirical_error_rates: epsilon in [0,1]");
    }
    DetectionStats stats;
    long missed = 0;
    long falsed = 0;
    for (const auto& t : trials) {
        if (t.active) {
            ++stats.active_trials;
            if (!t.decided_active) ++missed;
        } else {
            ++stats.inactive_trials;
            if (t.decided_active) ++falsed;
        }
    }
    if (stats.active_trials > 0) {
        stats.p_miss = static_cast<double>(missed) /
                       static_cast<double>(stats.active_trials);
    }
    if (stats.inactive_trials > 0) {
        stats.p_false = static_cast<double>(falsed) /
                        static_cast<double>(stats.inactive_trials);
    }
    if (stats.p_miss && stats.p_false) {
        stats.p_error = epsilon * *stats.p_miss + (1.0 - epsilon) * *stats.p_false;
    }
    return stats;
}

}  // namespace cfiot::detection
