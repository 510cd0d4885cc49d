#include "cfiot/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace cfiot::signal {

std::complex<double> complex_gaussian(double variance, Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

MatrixXcd generate_pilots(int tau, int k_devices, Rng& rng) {
    if (tau < 1 || k_devices < 1) {
        throw std::domain_error("generate_pilots: require tau >= 1, K >= 1");
    }
    MatrixXcd psi(tau, k_devices);
    const double var = 1.0 / static_cast<double>(tau);
    for (int k = 0; k < k_devices; ++k) {
        for (int t = 0; t < tau; ++t) psi(t, k) = complex_gaussian(var, rng);
    }
    return psi;
}

std::vector<std::uint8_t> sample_activity(double epsilon, int k_devices, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::domain_error("sample_activity: epsilon in [0,1]");
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<std::uint8_t> alpha(k_devices);
    for (auto& a : alpha) a = u01(rng) < epsilon ? 1 : 0;
    return alpha;
}

ApSignal synthesize_received(const MatrixXcd& pilots, const VectorXd& betas,
                             const std::vector<std::uint8_t>& activity,
                             double energy, int n_antennas, Rng& rng,
                             bool noise_enabled) {
    const int devices = static_cast<int>(pilots.cols());
    const int tau = static_cast<int>(pilots.rows());
    if (betas.size() != devices || static_cast<int>(activity.size()) != devices) {
        throw std::invalid_argument("synthesize_received: dimension mismatch");
    }
    if (!(energy > 0.0)) {
        throw std::domain_error("synthesize_received: require E > 0");
    }
    ApSignal sig;
    sig.channels = MatrixXcd(devices, n_antennas);
    sig.sparse = MatrixXcd::Zero(devices, n_antennas);
    for (int k = 0; k < devices; ++k) {
        for (int n = 0; n < n_antennas; ++n) {
            sig.channels(k, n) = complex_gaussian(betas[k], rng);
        }
        if (activity[k]) sig.sparse.row(k) = sig.channels.row(k);
    }
    sig.received = std::sqrt(energy) * (pilots * sig.sparse);
    if (noise_enabled) {
        for (int n = 0; n < n_antennas; ++n) {
            for (int t = 0; t < tau; ++t) {
                sig.received(t, n) += complex_gaussian(1.0, rng);
            }
        }
    }
    return sig;
}

}  // namespace cfiot::signal
