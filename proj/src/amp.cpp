#include "cfiot/amp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cfiot::amp {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

DenoiserStats denoiser_stats(double xhat_sq_norm, int n_antennas, double beta,
                             double theta, double epsilon) {
    if (!(beta > 0.0) || !(theta > 0.0)) {
        throw std::domain_error("denoiser_stats: require beta > 0, theta > 0");
    }
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::domain_error("denoiser_stats: epsilon in [0,1]");
    }
    DenoiserStats s;
    const double a = 1.0 / theta - 1.0 / (beta + theta);
    s.mu = a * xhat_sq_norm / n_antennas;
    s.nu = std::log1p(beta / theta);
    if (epsilon <= 0.0) {
        s.phi = 0.0;
    } else if (epsilon >= 1.0) {
        s.phi = 1.0;
    } else {
        // posterior activity weight, evaluated in the log domain
        s.phi = sigmoid(n_antennas * (s.mu - s.nu) + std::log(epsilon / (1.0 - epsilon)));
    }
    s.xi = s.phi * beta / (beta + theta);
    return s;
}

VectorXcd denoise(const VectorXcd& xhat, double beta, double theta,
                  double epsilon, DenoiserStats* stats) {
    DenoiserStats s = denoiser_stats(xhat.squaredNorm(), static_cast<int>(xhat.size()),
                                     beta, theta, epsilon);
    if (stats) *stats = s;
    return s.xi * xhat;
}

Eigen::MatrixXcd denoiser_jacobian(const VectorXcd& xhat, double beta,
                                   double theta, double epsilon) {
    const int n = static_cast<int>(xhat.size());
    DenoiserStats s = denoiser_stats(xhat.squaredNorm(), n, beta, theta, epsilon);
    const double a = 1.0 / theta - 1.0 / (beta + theta);
    const double c = a * s.phi * (1.0 - s.phi) * beta / (beta + theta);
    Eigen::MatrixXcd j = s.xi * Eigen::MatrixXcd::Identity(n, n);
    j.noalias() += c * (xhat * xhat.adjoint());
    return j;
}

double state_evolution_init(double energy, double epsilon, const VectorXd& betas,
                            double tau) {
    if (!(energy > 0.0)) throw std::domain_error("state_evolution_init: E > 0");
    return 1.0 / energy + epsilon / tau * betas.sum();
}

double state_evolution_step(double theta, double energy, double epsilon,
                            const VectorXd& betas, double device_count,
                            double tau, int n_antennas, int mc_samples,
                            Rng& rng) {
    if (theta < 1.0 / energy * (1.0 - 1e-12)) {
        throw std::domain_error("state_evolution_step: theta below noise floor 1/E");
    }
    const int n = n_antennas;
    std::normal_distribution<double> half_gauss(0.0, std::sqrt(0.5));
    std::gamma_distribution<double> chi_n(n, 1.0);
    std::gamma_distribution<double> chi_nm1(n > 1 ? n - 1 : 1, 1.0);

    double total = 0.0;
    for (int ki = 0; ki < betas.size(); ++ki) {
        const double beta = betas[ki];
        double active_sum = 0.0;
        double inactive_sum = 0.0;
        for (int s = 0; s < mc_samples; ++s) {
            // Active branch. Decompose V along X: ||X||^2 ~ Gamma(N, beta)
            // (complex), the aligned component of V is CN(0,1), the
            // orthogonal energy ~ Gamma(N-1, 1).
            double x_sq = beta * chi_n(rng);
            double cr = half_gauss(rng), ci = half_gauss(rng);
            double v_perp = n > 1 ? chi_nm1(rng) : 0.0;
            double aligned_re = std::sqrt(x_sq) + std::sqrt(theta) * cr;
            double aligned_im = std::sqrt(theta) * ci;
            double xhat_sq = aligned_re * aligned_re + aligned_im * aligned_im +
                             theta * v_perp;
            double v_sq = cr * cr + ci * ci + v_perp;
            DenoiserStats st = denoiser_stats(xhat_sq, n, beta, theta, epsilon);
            active_sum += (st.xi - 1.0) * (st.xi - 1.0) * x_sq +
                          st.xi * st.xi * theta * v_sq;

            // Inactive branch: X = 0, xhat = sqrt(theta) V.
            double w_sq = chi_n(rng);
            DenoiserStats st0 = denoiser_stats(theta * w_sq, n, beta, theta, epsilon);
            inactive_sum += st0.xi * st0.xi * theta * w_sq;
        }
        total += epsilon * active_sum / mc_samples +
                 (1.0 - epsilon) * inactive_sum / mc_samples;
    }
    double mean_term = betas.size() > 0 ? total / static_cast<double>(betas.size()) : 0.0;
    return 1.0 / energy + device_count / (n * tau) * mean_term;
}

std::vector<double> state_evolution_schedule(double energy, double epsilon,
                                             const VectorXd& betas,
                                             double device_count, double tau,
                                             int n_antennas, int iterations,
                                             int mc_samples, Rng& rng) {
    std::vector<double> thetas;
    thetas.reserve(iterations + 1);
    double theta = 1.0 / energy +
                   epsilon * device_count / tau *
                       (betas.size() > 0 ? betas.mean() : 0.0);
    thetas.push_back(theta);
    for (int t = 0; t < iterations; ++t) {
        theta = state_evolution_step(theta, energy, epsilon, betas, device_count,
                                     tau, n_antennas, mc_samples, rng);
        thetas.push_back(theta);
    }
    return thetas;
}

double state_evolution_fixed_point(double energy, double epsilon,
                                   const VectorXd& betas, double device_count,
                                   double tau, int n_antennas,
                                   const SeOptions& opts, Rng& rng) {
    double theta = 1.0 / energy +
                   epsilon * device_count / tau *
                       (betas.size() > 0 ? betas.mean() : 0.0);
    for (int t = 0; t < opts.max_iters; ++t) {
        double next = state_evolution_step(theta, energy, epsilon, betas,
                                           device_count, tau, n_antennas,
                                           opts.mc_samples, rng);
        double rel = std::fabs(next - theta) / theta;
        theta = next;
        if (rel < opts.rel_tol) break;
    }
    return theta;
}

AmpResult amp_run(const MatrixXcd& received, const MatrixXcd& pilots,
                  const VectorXd& betas, double energy, double epsilon,
                  const std::vector<double>& theta_schedule,
                  const AmpOptions& opts) {
    const int tau = static_cast<int>(pilots.rows());
    const int devices = static_cast<int>(pilots.cols());
    const int n = static_cast<int>(received.cols());
    if (received.rows() != tau || betas.size() != devices) {
        throw std::invalid_argument("amp_run: dimension mismatch");
    }
    if (!opts.online_theta &&
        static_cast<int>(theta_schedule.size()) < opts.iterations + 1) {
        throw std::invalid_argument("amp_run: theta schedule too short");
    }

    const MatrixXcd y = received / std::sqrt(energy);
    MatrixXcd x = MatrixXcd::Zero(devices, n);
    MatrixXcd r = y;
    MatrixXcd xhat(devices, n);

    AmpResult out;
    const double theta_floor = 1.0 / energy;
    double theta0 = 0.0;
    double theta = 0.0;

    auto theta_at = [&](int t) {
        if (!opts.online_theta) return theta_schedule[t];
        return std::max(r.squaredNorm() / (tau * n), theta_floor);
    };

    VectorXd xi(devices), cvec(devices);
    for (int t = 0; t <= opts.iterations; ++t) {
        theta = theta_at(t);
        if (t == 0) theta0 = theta;
        if (theta > 1e6 * theta0) {
            std::ostringstream msg;
            msg << "amp_run: divergence at t=" << t << " theta=" << theta
                << " theta0=" << theta0 << " residual=" << r.squaredNorm();
            throw std::runtime_error(msg.str());
        }
        out.theta_trace.push_back(theta);
        out.residual_trace.push_back(r.squaredNorm() / (tau * n));

        xhat = x;
        xhat.noalias() += pilots.adjoint() * r;
        if (opts.keep_history) out.xhat_history.push_back(xhat);
        if (t == opts.iterations) break;

        double xi_sum = 0.0;
        for (int k = 0; k < devices; ++k) {
            DenoiserStats st = denoiser_stats(xhat.row(k).squaredNorm(), n,
                                              betas[k], theta, epsilon);
            xi[k] = st.xi;
            const double a = 1.0 / theta - 1.0 / (betas[k] + theta);
            cvec[k] = a * st.phi * (1.0 - st.phi) * betas[k] / (betas[k] + theta);
            xi_sum += st.xi;
            x.row(k) = st.xi * xhat.row(k);
        }
        // Onsager term: R_t times the device-averaged denoiser Jacobian
        // (row convention, hence the transpose xi I + conj(xhat) xhat^T).
        MatrixXcd onsager = (xi_sum / tau) * MatrixXcd::Identity(n, n);
        onsager.noalias() +=
            (xhat.adjoint() * cvec.asDiagonal() * xhat) / static_cast<double>(tau);
        MatrixXcd r_next = y;
        r_next.noalias() -= pilots * x;
        r_next.noalias() += r * onsager;
        r = std::move(r_next);
    }

    out.xhat = xhat;
    out.theta = theta;
    out.mu.resize(devices);
    out.nu.resize(devices);
    for (int k = 0; k < devices; ++k) {
        DenoiserStats st = denoiser_stats(xhat.row(k).squaredNorm(), n, betas[k],
                                          theta, epsilon);
        out.mu[k] = st.mu;
        out.nu[k] = st.nu;
    }
    return out;
}

}  // namespace cfiot::amp
