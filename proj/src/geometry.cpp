#include "cfiot/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace cfiot::geometry {

double PathLossModel::l0_db() const {
    double lf = std::log10(carrier_freq_mhz);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(ap_height_m) -
           (1.1 * lf - 0.7) * device_height_m + (1.56 * lf - 0.8);
}

double PathLossModel::beta_db(double r_km) const {
    if (!(r_km > 0.0)) {
        throw std::domain_error("path_loss: require r > 0");
    }
    const double l0 = l0_db();
    const double d0 = d0_m / 1000.0;
    const double d1 = d1_m / 1000.0;
    if (r_km > d1) return -l0 - 35.0 * std::log10(r_km);
    if (r_km <= d0) return -l0 - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
    return -l0 - 15.0 * std::log10(d1) - 20.0 * std::log10(r_km);
}

double PathLossModel::beta(double r_km) const {
    return std::pow(10.0, beta_db(r_km) / 10.0);
}

double PathLossModel::radius_for_beta(double beta_lin) const {
    if (!(beta_lin > 0.0)) {
        throw std::domain_error("radius_for_beta: require beta > 0");
    }
    const double db = 10.0 * std::log10(beta_lin);
    const double l0 = l0_db();
    const double d0 = d0_m / 1000.0;
    const double d1 = d1_m / 1000.0;
    if (db >= beta_db(d0)) return d0;
    if (db >= beta_db(d1)) {
        // middle branch: db = -l0 - 15 log10(d1) - 20 log10(r)
        return std::pow(10.0, -(db + l0 + 15.0 * std::log10(d1)) / 20.0);
    }
    return std::pow(10.0, -(db + l0) / 35.0);
}

std::vector<Point> sample_ppp_rect(double density_per_km2, double width_km,
                                   double height_km, Rng& rng) {
    if (density_per_km2 < 0.0) {
        throw std::domain_error("sample_ppp: negative density");
    }
    double mean = density_per_km2 * width_km * height_km;
    std::poisson_distribution<int> count_dist(mean);
    int n = mean > 0.0 ? count_dist(rng) : 0;
    std::uniform_real_distribution<double> ux(0.0, width_km), uy(0.0, height_km);
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p.x = ux(rng);
        p.y = uy(rng);
    }
    return pts;
}

std::vector<Point> sample_ppp_disk(double density_per_km2, double radius_km,
                                   Rng& rng, Point center) {
    if (density_per_km2 < 0.0) {
        throw std::domain_error("sample_ppp: negative density");
    }
    double mean = density_per_km2 * M_PI * radius_km * radius_km;
    std::poisson_distribution<int> count_dist(mean);
    int n = mean > 0.0 ? count_dist(rng) : 0;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        double r = radius_km * std::sqrt(u01(rng));
        double phi = 2.0 * M_PI * u01(rng);
        p.x = center.x + r * std::cos(phi);
        p.y = center.y + r * std::sin(phi);
    }
    return pts;
}

void build_neighbor_sets(NetworkRealization& net) {
    const int ap_n = net.ap_count();
    const int dev_n = net.device_count();
    net.coverage_aps.assign(dev_n, {});
    net.cooperating_aps.assign(dev_n, {});
    net.covered_devices.assign(ap_n, {});
    net.beta = Eigen::MatrixXd::Zero(ap_n, dev_n);
    for (int m = 0; m < ap_n; ++m) {
        for (int k = 0; k < dev_n; ++k) {
            double r = distance_km(net.ap_positions[m], net.device_positions[k]);
            if (r <= net.params.r0_km) {
                net.beta(m, k) = net.params.path_loss.beta(std::max(r, 1e-9));
                net.coverage_aps[k].push_back(m);
                net.covered_devices[m].push_back(k);
                if (r <= net.params.r1_km) net.cooperating_aps[k].push_back(m);
            }
        }
    }
}

NetworkRealization make_network(const NetworkParams& params, std::uint64_t seed) {
    if (params.r1_km > params.r0_km) {
        throw std::domain_error("make_network: require R1 <= R0");
    }
    NetworkRealization net;
    net.params = params;
    net.seed = seed;

    Rng ap_rng = make_rng(seed, /*stream=*/1);
    Rng dev_rng = make_rng(seed, /*stream=*/2);
    const double w = params.window_km;
    net.ap_positions = sample_ppp_rect(params.lambda_a, w, w, ap_rng);

    // Devices only in the inner window so each has a full coverage disk.
    double inner = w - 2.0 * params.r0_km;
    if (inner < 0.0) {
        throw std::domain_error("make_network: window too small for inner margin R0");
    }
    net.device_positions = sample_ppp_rect(params.lambda_d, inner, inner, dev_rng);
    for (auto& p : net.device_positions) {
        p.x += params.r0_km;
        p.y += params.r0_km;
    }
    build_neighbor_sets(net);
    return net;
}

std::string NetworkRealization::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["lambda_a"] = params.lambda_a;
    j["lambda_d"] = params.lambda_d;
    j["r0_km"] = params.r0_km;
    j["r1_km"] = params.r1_km;
    j["window_km"] = params.window_km;
    j["path_loss"] = {{"carrier_freq_mhz", params.path_loss.carrier_freq_mhz},
                      {"ap_height_m", params.path_loss.ap_height_m},
                      {"device_height_m", params.path_loss.device_height_m},
                      {"d0_m", params.path_loss.d0_m},
                      {"d1_m", params.path_loss.d1_m}};
    auto dump_points = [](const std::vector<Point>& pts) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : pts) arr.push_back({p.x, p.y});
        return arr;
    };
    j["ap_positions"] = dump_points(ap_positions);
    j["device_positions"] = dump_points(device_positions);
    return j.dump(2);
}

NetworkRealization NetworkRealization::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    NetworkRealization net;
    net.seed = j.at("seed").get<std::uint64_t>();
    net.params.lambda_a = j.at("lambda_a").get<double>();
    net.params.lambda_d = j.at("lambda_d").get<double>();
    net.params.r0_km = j.at("r0_km").get<double>();
    net.params.r1_km = j.at("r1_km").get<double>();
    net.params.window_km = j.at("window_km").get<double>();
    const auto& pl = j.at("path_loss");
    net.params.path_loss.carrier_freq_mhz = pl.at("carrier_freq_mhz").get<double>();
    net.params.path_loss.ap_height_m = pl.at("ap_height_m").get<double>();
    net.params.path_loss.device_height_m = pl.at("device_height_m").get<double>();
    net.params.path_loss.d0_m = pl.at("d0_m").get<double>();
    net.params.path_loss.d1_m = pl.at("d1_m").get<double>();
    auto load_points = [](const nlohmann::json& arr) {
        std::vector<Point> pts;
        pts.reserve(arr.size());
        for (const auto& e : arr) pts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        return pts;
    };
    net.ap_positions = load_points(j.at("ap_positions"));
    net.device_positions = load_points(j.at("device_positions"));
    build_neighbor_sets(net);
    return net;
}

}  // namespace cfiot::geometry
