#include "cfiot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfiot/detection.hpp"
#include "cfiot/special.hpp"

namespace cfiot::analysis {
namespace {

constexpr int kMaxFixedPointIters = 10000;
constexpr double kFixedPointTol = 1e-10;


CoverageResult pooled_beta_root(double shape, double theta, double epsilon,
                                double p0, double beta_lo, double beta_hi) {
    CoverageResult result;
    if (pooled_error_probability(shape, theta, beta_hi, epsilon) > p0) {
        result.boundary = true;  // even the strongest gain fails
        result.beta_root = beta_hi;
        return result;
    }
    if (pooled_error_probability(shape, theta, beta_lo, epsilon) <= p0) {
        result.boundary = true;  // every admissible gain qualifies
        result.coverage = 1.0;
        result.beta_root = beta_lo;
        return result;
    }
    double lo = beta_lo;  // error > p0 here
    double hi = beta_hi;  // error <= p0 here
    while ((hi - lo) > 1e-8 * hi) {
        const double mid = std::sqrt(lo * hi);
        if (pooled_error_probability(shape, theta, mid, epsilon) > p0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    result.beta_root = 0.5 * (lo + hi);
    return result;
}

}  // namespace

WsApprox ws_params(const VectorXd& betas, const VectorXd& thetas,
                   const VectorXd& weights, int n_antennas,
                   bool mixed_inactive_scale) {
    const auto m = betas.size();
    if (m == 0 || thetas.size() != m || weights.size() != m) {
        throw std::invalid_argument("ws_params: inconsistent inputs");
    }
    if (n_antennas <= 0) throw std::domain_error("ws_params: antennas >= 1");
    const double n = static_cast<double>(n_antennas);
    double sum_t = 0.0, sum_t2 = 0.0;     // active scales
    double sum_tp = 0.0, sum_tp2 = 0.0;   // inactive scales
    double nu = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (betas[i] <= 0.0 || thetas[i] <= 0.0) {
            throw std::domain_error("ws_params: gains and noise levels > 0");
        }
        const double t = weights[i] * betas[i] / (n * thetas[i]);
        const double tp = weights[i] * betas[i] / (n * (thetas[i] + betas[i]));
        sum_t += t;
        sum_t2 += t * t;
        sum_tp += tp;
        sum_tp2 += tp * tp;
        nu += weights[i] * std::log1p(betas[i] / thetas[i]);
    }
    if (sum_t <= 0.0) {
        throw std::domain_error("ws_params: weights must have positive mass");
    }
    WsApprox ws;
    ws.s_active = n * sum_t * sum_t / sum_t2;
    ws.omega_active = sum_t2 / sum_t;
    ws.s_inactive = n * sum_tp * sum_tp / sum_tp2;
    ws.omega_inactive =
        (mixed_inactive_scale ? sum_t2 : sum_tp2) / sum_tp;
    ws.nu_threshold = nu;
    return ws;
}

ErrorProbs detection_error_closed_form(const WsApprox& ws, double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::domain_error("detection_error_closed_form: epsilon in [0,1]");
    }
    ErrorProbs probs;
    if (ws.nu_threshold <= 0.0) {
        probs.p_miss = 0.0;
        probs.p_false = 1.0;
    } else {
        probs.p_miss = special::reg_lower_gamma(
            ws.s_active, ws.nu_threshold / ws.omega_active);
        probs.p_false = special::reg_upper_gamma(
            ws.s_inactive, ws.nu_threshold / ws.omega_inactive);
    }
    probs.p_error = epsilon * probs.p_miss + (1.0 - epsilon) * probs.p_false;
    return probs;
}

DeterministicEquivalents deterministic_equivalents(const VectorXd& betas,
                                                   double energy, double tau) {
    if (energy <= 0.0 || tau <= 0.0) {
        throw std::domain_error("deterministic_equivalents: E, tau > 0");
    }
    DeterministicEquivalents de;
    const auto n = betas.size();
    if (n == 0) {
        de.varsigma = VectorXd();
        de.varsigma_hat = VectorXd();
        return de;
    }
    const VectorXd eb = energy * betas;
    VectorXd vs = VectorXd::Ones(n);
    VectorXd prev_delta = VectorXd::Zero(n);
    double q = 1.0;
    bool converged = false;
    for (int iter = 0; iter < kMaxFixedPointIters; ++iter) {
        const double denom =
            (eb.array() / (tau * (1.0 + vs.array()))).sum() + 1.0;
        q = 1.0 / denom;
        VectorXd next = eb * q;
        VectorXd delta = next - vs;
        if (iter > 0 && delta.dot(prev_delta) < 0.0) {
            next = vs + 0.5 * delta;  // damp on oscillation
            delta = next - vs;
        }
        prev_delta = delta;
        vs = next;
        if (delta.cwiseAbs().maxCoeff() <
            kFixedPointTol * (1.0 + vs.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw std::runtime_error(
            "deterministic_equivalents: fixed point did not converge");
    }
    q = 1.0 / ((eb.array() / (tau * (1.0 + vs.array()))).sum() + 1.0);

    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            jac(i, j) = eb[i] * eb[j] * q * q /
                        (tau * (1.0 + vs[j]) * (1.0 + vs[j]));
        }
    }
    const VectorXd r = eb * (q * q);
    const VectorXd vs_hat =
        (Eigen::MatrixXd::Identity(n, n) - jac).partialPivLu().solve(r);

    de.q = q;
    de.varsigma = vs;
    de.varsigma_hat = vs_hat;
    de.q_bar =
        (1.0 +
         (eb.array() * vs_hat.array() / (tau * (1.0 + vs.array()).square()))
             .sum()) *
        q * q;
    return de;
}

double asymptotic_mse(double beta_k, const VectorXd& detected_others,
                      const VectorXd& missed,
                      const std::vector<int>& false_indices, double energy,
                      double tau) {
    if (beta_k <= 0.0) throw std::domain_error("asymptotic_mse: beta_k > 0");
    const auto de = deterministic_equivalents(detected_others, energy, tau);
    const double load = 1.0 + energy * beta_k * de.q;
    double e_bar = beta_k / load;

    const double shared =
        energy * energy * beta_k * beta_k / (tau * load * load);
    for (Eigen::Index i = 0; i < missed.size(); ++i) {
        e_bar -= shared * missed[i] * de.q_bar;
    }
    for (int j : false_indices) {
        if (j < 0 || j >= detected_others.size()) {
            throw std::out_of_range("asymptotic_mse: false-detection index");
        }
        VectorXd reduced(detected_others.size() - 1);
        Eigen::Index out = 0;
        for (Eigen::Index i = 0; i < detected_others.size(); ++i) {
            if (i != j) reduced[out++] = detected_others[i];
        }
        const auto de_j = deterministic_equivalents(reduced, energy, tau);
        const double load_j = 1.0 + energy * detected_others[j] * de_j.q;
        e_bar += shared * detected_others[j] * de_j.q_bar / (load_j * load_j);
    }
    return e_bar;
}

double pooled_error_probability(double shape, double theta, double beta,
                                double epsilon) {
    if (shape <= 0.0 || theta <= 0.0 || beta <= 0.0) {
        throw std::domain_error("pooled_error_probability: positive inputs");
    }
    const double ratio = beta / theta;
    const double nu = std::log1p(ratio);
    const double miss_arg = shape * nu / ratio;
    const double false_arg = shape * (1.0 + 1.0 / ratio) * nu;
    return epsilon * special::reg_lower_gamma(shape, miss_arg) +
           (1.0 - epsilon) * special::reg_upper_gamma(shape, false_arg);
}

CoverageResult coverage_collocated(int n_antennas, double ap_equiv_count,
                                   double theta, double epsilon, double p0,
                                   const geometry::PathLossModel& model,
                                   double r0_km) {
    if (p0 >= 1.0) return {1.0, 0.0, r0_km, true};
    if (p0 <= 0.0) return {0.0, 0.0, 0.0, true};
    const double shape = n_antennas * ap_equiv_count;
    const double beta_edge = model.beta(r0_km);
    const double beta_flat = model.beta(model.d0_m / 1000.0);
    CoverageResult result =
        pooled_beta_root(shape, theta, epsilon, p0, beta_edge, beta_flat);
    if (result.boundary) {
        result.radius_km = result.coverage >= 1.0 ? r0_km : 0.0;
        return result;
    }
    const double r = std::clamp(model.radius_for_beta(result.beta_root), 0.0,
                                r0_km);
    result.radius_km = r;
    result.coverage = (r / r0_km) * (r / r0_km);
    return result;
}

CoverageResult coverage_smallcell(int n_antennas, double theta, double epsilon,
                                  double p0, double lambda_a,
                                  const geometry::PathLossModel& model,
                                  double r0_km) {
    if (lambda_a <= 0.0) return {0.0, 0.0, 0.0, true};
    if (p0 >= 1.0) return {1.0, 0.0, r0_km, true};
    if (p0 <= 0.0) return {0.0, 0.0, 0.0, true};
    const double shape = n_antennas;
    const double beta_far = model.beta(100.0 * r0_km);
    const double beta_flat = model.beta(model.d0_m / 1000.0);
    CoverageResult result =
        pooled_beta_root(shape, theta, epsilon, p0, beta_far, beta_flat);
    if (result.boundary && result.coverage < 1.0) {
        result.radius_km = 0.0;
        return result;
    }
    const double r = result.boundary ? 100.0 * r0_km
                                     : model.radius_for_beta(result.beta_root);
    result.boundary = result.boundary && r >= 100.0 * r0_km;
    result.radius_km = r;
    result.coverage = 1.0 - std::exp(-lambda_a * M_PI * r * r);
    return result;
}

CoverageMcResult coverage_cellfree_mc(const CoverageMcConfig& cfg,
                                      const geometry::PathLossModel& model,
                                      WeightStrategy strategy, int realizations,
                                      std::uint64_t seed) {
    if (realizations < 1) {
        throw std::invalid_argument("coverage_cellfree_mc: realizations >= 1");
    }
    const double mean_aps = cfg.lambda_a * M_PI * cfg.r1_km * cfg.r1_km;
    int covered = 0;
    for (int t = 0; t < realizations; ++t) {
        auto rng = make_rng(seed, 0x63667631ULL, static_cast<std::uint64_t>(t));
        std::poisson_distribution<int> count_dist(mean_aps);
        const int m = count_dist(rng);
        double p_err = 1.0;
        if (m > 0) {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            VectorXd betas(m);
            for (int i = 0; i < m; ++i) {
                const double r = cfg.r1_km * std::sqrt(unit(rng));
                betas[i] = model.beta(std::max(r, 1e-6));
            }
            const VectorXd thetas = VectorXd::Constant(m, cfg.theta);
            detection::FusionWeights w;
            switch (strategy) {
                case WeightStrategy::equal:
                    w = detection::weights_equal(m);
                    break;
                case WeightStrategy::smallcell:
                    w = detection::weights_smallcell(betas);
                    break;
                case WeightStrategy::optimal:
                    w = detection::weights_optimal(betas, thetas,
                                                   cfg.n_antennas, cfg.epsilon,
                                                   cfg.grid_resolution);
                    break;
            }
            const auto ws =
                ws_params(betas, thetas, w.weights, cfg.n_antennas);
            p_err = detection_error_closed_form(ws, cfg.epsilon).p_error;
        }
        if (p_err <= cfg.p0) ++covered;
    }
    CoverageMcResult result;
    result.realizations = realizations;
    result.coverage = static_cast<double>(covered) / realizations;
    result.stderr_est = std::sqrt(
        std::max(result.coverage * (1.0 - result.coverage), 0.0) /
        realizations);
    return result;
}

VectorXd quantile_betas(const geometry::PathLossModel& model, double r0_km,
                        int count) {
    if (count <= 0) throw std::invalid_argument("quantile_betas: count >= 1");
    VectorXd betas(count);
    for (int i = 0; i < count; ++i) {
        const double r = r0_km * std::sqrt((i + 0.5) / count);
        betas[i] = model.beta(r);
    }
    return betas;
}

}  // namespace cfiot::analysis
