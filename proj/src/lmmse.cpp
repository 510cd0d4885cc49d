#include "cfiot/lmmse.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace cfiot::lmmse {

MatrixXcd build_covariance(const MatrixXcd& pilots, const VectorXd& betas,
                           const std::vector<int>& index_set, double energy) {
    if (energy <= 0.0) throw std::domain_error("build_covariance: energy > 0");
    const auto tau = pilots.rows();
    MatrixXcd z = MatrixXcd::Identity(tau, tau);
    for (int k : index_set) {
        if (k < 0 || k >= pilots.cols()) {
            throw std::out_of_range("build_covariance: device index");
        }
        z.noalias() +=
            (energy * betas[k]) * pilots.col(k) * pilots.col(k).adjoint();
    }
    return z;
}

MatrixXcd lmmse_estimate(const MatrixXcd& pilots, const VectorXd& betas,
                         const std::vector<int>& detected,
                         const MatrixXcd& received, double energy) {
    if (received.rows() != pilots.rows()) {
        throw std::invalid_argument("lmmse_estimate: snapshot length mismatch");
    }
    if (betas.size() != pilots.cols()) {
        throw std::invalid_argument("lmmse_estimate: gain count mismatch");
    }
    const MatrixXcd z = build_covariance(pilots, betas, detected, energy);
    const Eigen::LLT<MatrixXcd> llt(z);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("lmmse_estimate: covariance not SPD");
    }
    const MatrixXcd solved = llt.solve(received);  // Z^-1 Y, tau x N
    MatrixXcd estimates = MatrixXcd::Zero(pilots.cols(), received.cols());
    const double root_e = std::sqrt(energy);
    for (int k : detected) {
        estimates.row(k) =
            (root_e * betas[k]) * (pilots.col(k).adjoint() * solved);
    }
    return estimates;
}

MseBreakdown empirical_channel_mse(const MatrixXcd& channels,
                                   const MatrixXcd& estimates,
                                   const std::vector<int>& detected) {
    if (channels.rows() != estimates.rows() ||
        channels.cols() != estimates.cols()) {
        throw std::invalid_argument("empirical_channel_mse: shape mismatch");
    }
    if (detected.empty()) return {};
    double err = 0.0;
    double pow = 0.0;
    for (int k : detected) {
        err += (channels.row(k) - estimates.row(k)).squaredNorm();
        pow += estimates.row(k).squaredNorm();
    }
    const double denom =
        static_cast<double>(detected.size()) *
        static_cast<double>(channels.cols());
    return {err / denom, pow / denom};
}

}  // namespace cfiot::lmmse
