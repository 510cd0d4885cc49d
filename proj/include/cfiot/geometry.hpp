#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cfiot/rng.hpp"

namespace cfiot::geometry {

struct Point {
    double x = 0.0;  // km
    double y = 0.0;  // km
};

inline double distance_km(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Three-segment distance law: flat below d0, 20 dB/decade between d0 and d1,
// 35 dB/decade beyond d1. Breakpoints are given in meters; evaluation
// distances in km (the constant term is calibrated for km).
struct PathLossModel {
    double carrier_freq_mhz = 1900.0;
    double ap_height_m = 7.0;
    double device_height_m = 1.65;
    double d0_m = 10.0;
    double d1_m = 50.0;

    double l0_db() const;
    double beta_db(double r_km) const;
    // Linear gain 10^(beta_db/10). Throws std::domain_error for r <= 0.
    double beta(double r_km) const;
    // Piecewise inverse: distance (km) at which the linear gain equals
    // beta_lin. Gains at or above the flat-segment value map to d0.
    double radius_for_beta(double beta_lin) const;
};

// Homogeneous PPP samplers. Count ~ Poisson(density * area), points i.i.d.
// uniform. Negative density throws std::domain_error.
std::vector<Point> sample_ppp_rect(double density_per_km2, double width_km,
                                   double height_km, Rng& rng);
std::vector<Point> sample_ppp_disk(double density_per_km2, double radius_km,
                                   Rng& rng, Point center = {});

struct NetworkParams {
    double lambda_a = 2.0;    // APs / km^2
    double lambda_d = 637.0;  // devices / km^2
    double r0_km = 2.0;       // coverage radius
    double r1_km = 1.0;       // cooperation radius, <= r0
    double window_km = 6.0;   // side of the square simulation window
    PathLossModel path_loss;
};

// One realization of the stochastic network. APs are sampled over the full
// square window; devices over the inner window at margin R0 so every device
// carries an unclipped coverage disk. beta(m,k) is zero iff r_{m,k} > R0.
struct NetworkRealization {
    NetworkParams params;
    std::uint64_t seed = 0;
    std::vector<Point> ap_positions;
    std::vector<Point> device_positions;
    Eigen::MatrixXd beta;  // M x K linear gains

    std::vector<std::vector<int>> coverage_aps;     // A_k: r <= R0
    std::vector<std::vector<int>> cooperating_aps;  // A~_k: r <= R1
    std::vector<std::vector<int>> covered_devices;  // D_m: r <= R0

    int ap_count() const { return static_cast<int>(ap_positions.size()); }
    int device_count() const { return static_cast<int>(device_positions.size()); }

    std::string to_json() const;
    static NetworkRealization from_json(const std::string& text);
};

NetworkRealization make_network(const NetworkParams& params, std::uint64_t seed);

// Rebuilds A_k, A~_k, D_m from positions and radii (inclusive comparisons).
void build_neighbor_sets(NetworkRealization& net);

}  // namespace cfiot::geometry
