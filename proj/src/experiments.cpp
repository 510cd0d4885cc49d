#include "cfiot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cfiot/amp.hpp"
#include "cfiot/analysis.hpp"
#include "cfiot/detection.hpp"
#include "cfiot/geometry.hpp"
#include "cfiot/lmmse.hpp"
#include "cfiot/signal.hpp"

namespace cfiot::experiments {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

constexpr std::uint64_t kStreamSe = 0x5345ULL;        // state evolution
constexpr std::uint64_t kStreamLink = 0x4c4bULL;      // reference-link trials
constexpr std::uint64_t kStreamGeom = 0x474dULL;      // network geometries
constexpr std::uint64_t kStreamMse = 0x4d53ULL;       // channel-error trials
constexpr std::uint64_t kStreamCoverage = 0x4356ULL;  // coverage MC

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << std::setprecision(17);
    return out;
}

void write_metadata(std::ofstream& out, const ExperimentConfig& cfg,
                    const std::string& figure) {
    out << "# figure=" << figure << "\n";
    out << "# desk_scale=true\n";
    out << "# master_seed=" << cfg.master_seed << "\n";
    out << "# trials=" << cfg.trials << " realizations=" << cfg.realizations
        << "\n";
}

analysis::WeightStrategy parse_strategy(const std::string& name) {
    if (name == "equal") return analysis::WeightStrategy::equal;
    if (name == "smallcell") return analysis::WeightStrategy::smallcell;
    if (name == "optimal") return analysis::WeightStrategy::optimal;
    throw std::invalid_argument("unknown weight_strategy: " + name);
}

// Converged residual-variance level for a network-scale AP population.
double network_theta(const ExperimentConfig& cfg, int n_antennas) {
    const geometry::PathLossModel model;
    const VectorXd profile =
        analysis::quantile_betas(model, cfg.r0_km, cfg.se_profile_points);
    const double device_count =
        cfg.lambda_d * M_PI * cfg.r0_km * cfg.r0_km;
    auto rng = make_rng(cfg.master_seed, kStreamSe,
                        static_cast<std::uint64_t>(n_antennas));
    amp::SeOptions opts;
    opts.mc_samples = cfg.se_mc_samples;
    return amp::state_evolution_fixed_point(cfg.energy(), cfg.epsilon, profile,
                                            device_count, cfg.tau, n_antennas,
                                            opts, rng);
}

// Fixed multi-AP link: one target device (index 0 at every AP) plus a
// deterministic gain profile filling each AP's covered population.
struct RefLink {
    std::vector<VectorXd> ap_betas;  // per AP, size ref_devices_per_ap
    VectorXd target_betas;           // gain of the target at each AP
};

RefLink build_ref_link(const ExperimentConfig& cfg) {
    const geometry::PathLossModel model;
    RefLink link;
    const int count = cfg.ref_devices_per_ap;
    const VectorXd profile = analysis::quantile_betas(model, cfg.r0_km,
                                                      count - 1);
    link.target_betas.resize(
        static_cast<Eigen::Index>(cfg.ref_ap_distances_km.size()));
    for (std::size_t a = 0; a < cfg.ref_ap_distances_km.size(); ++a) {
        VectorXd betas(count);
        betas[0] = model.beta(cfg.ref_ap_distances_km[a]);
        betas.tail(count - 1) = profile;
        link.target_betas[static_cast<Eigen::Index>(a)] = betas[0];
        link.ap_betas.push_back(std::move(betas));
    }
    return link;
}

struct LinkPoint {
    double p_closed = 0.0;
    double p_empirical = 0.0;
    double stderr_empirical = 0.0;
    long active_trials = 0;
    long inactive_trials = 0;
};

// Closed form vs full per-AP recovery + fusion at one (tau, N) point.
// Trials are split evenly between forced-active and forced-inactive target
// states so both error rates are estimated with low variance.
LinkPoint evaluate_link(const ExperimentConfig& cfg, const RefLink& link,
                        int tau, int n_antennas, std::uint64_t trial_stream) {
    const double energy = cfg.rho() * tau;
    const int ap_count = static_cast<int>(link.ap_betas.size());

    std::vector<std::vector<double>> schedules;
    VectorXd thetas(ap_count);
    for (int a = 0; a < ap_count; ++a) {
        auto rng = make_rng(cfg.master_seed, kStreamSe,
                            trial_stream * 64 + static_cast<std::uint64_t>(a));
        auto sched = amp::state_evolution_schedule(
            energy, cfg.epsilon, link.ap_betas[static_cast<std::size_t>(a)],
            cfg.ref_devices_per_ap, tau, n_antennas, cfg.amp_iterations,
            cfg.se_mc_samples, rng);
        thetas[a] = sched.back();
        schedules.push_back(std::move(sched));
    }

    LinkPoint point;
    const auto weights = detection::weights_equal(ap_count);
    const auto ws = analysis::ws_params(link.target_betas, thetas,
                                        weights.weights, n_antennas,
                                        cfg.mixed_inactive_scale);
    point.p_closed =
        analysis::detection_error_closed_form(ws, cfg.epsilon).p_error;

    long missed = 0, falsed = 0;
    const int active_trials = cfg.trials / 2;
    amp::AmpOptions amp_opts;
    amp_opts.iterations = cfg.amp_iterations;
    for (int t = 0; t < cfg.trials; ++t) {
        const bool target_active = t < active_trials;
        VectorXd mu(ap_count), nu(ap_count);
        for (int a = 0; a < ap_count; ++a) {
            auto rng = make_rng(cfg.master_seed, kStreamLink ^ trial_stream,
                                static_cast<std::uint64_t>(t) * 64 +
                                    static_cast<std::uint64_t>(a));
            const auto& betas = link.ap_betas[static_cast<std::size_t>(a)];
            auto activity =
                signal::sample_activity(cfg.epsilon, cfg.ref_devices_per_ap,
                                        rng);
            activity[0] = target_active ? 1 : 0;
            const MatrixXcd pilots =
                signal::generate_pilots(tau, cfg.ref_devices_per_ap, rng);
            const auto sig = signal::synthesize_received(
                pilots, betas, activity, energy, n_antennas, rng);
            const auto res =
                amp::amp_run(sig.received, pilots, betas, energy, cfg.epsilon,
                             schedules[static_cast<std::size_t>(a)], amp_opts);
            mu[a] = res.mu[0];
            nu[a] = res.nu[0];
        }
        const bool decided = detection::fuse_decide(mu, nu, weights);
        if (target_active && !decided) ++missed;
        if (!target_active && decided) ++falsed;
    }
    point.active_trials = active_trials;
    point.inactive_trials = cfg.trials - active_trials;
    const double pm = static_cast<double>(missed) / point.active_trials;
    const double pf = static_cast<double>(falsed) / point.inactive_trials;
    point.p_empirical = cfg.epsilon * pm + (1.0 - cfg.epsilon) * pf;
    point.stderr_empirical = std::sqrt(
        cfg.epsilon * cfg.epsilon * pm * (1.0 - pm) / point.active_trials +
        (1.0 - cfg.epsilon) * (1.0 - cfg.epsilon) * pf * (1.0 - pf) /
            point.inactive_trials);
    return point;
}

// Fused closed-form error probability for one sampled AP geometry around a
// typical device; 1.0 when no AP cooperates.
double geometry_p_error(const ExperimentConfig& cfg, double lambda_a,
                        double r1_km, int n_antennas, double theta,
                        analysis::WeightStrategy strategy, Rng& rng) {
    const geometry::PathLossModel model;
    std::poisson_distribution<int> count_dist(lambda_a * M_PI * r1_km * r1_km);
    const int m = count_dist(rng);
    if (m == 0) return 1.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    VectorXd betas(m);
    for (int i = 0; i < m; ++i) {
        const double r = r1_km * std::sqrt(unit(rng));
        betas[i] = model.beta(std::max(r, 1e-6));
    }
    const VectorXd thetas = VectorXd::Constant(m, theta);
    detection::FusionWeights w;
    switch (strategy) {
        case analysis::WeightStrategy::equal:
            w = detection::weights_equal(m);
            break;
        case analysis::WeightStrategy::smallcell:
            w = detection::weights_smallcell(betas);
            break;
        case analysis::WeightStrategy::optimal:
            w = detection::weights_optimal(betas, thetas, n_antennas,
                                           cfg.epsilon, cfg.grid_resolution);
            break;
    }
    const auto ws = analysis::ws_params(betas, thetas, w.weights, n_antennas,
                                        cfg.mixed_inactive_scale);
    return analysis::detection_error_closed_form(ws, cfg.epsilon).p_error;
}

// Stratified device placements: one per equal-area (collocated) or
// equal-probability (small-cell nearest-AP distance) stratum.
double collocated_coverage_mc(const ExperimentConfig& cfg, int n_antennas,
                              double theta, int strata) {
    const geometry::PathLossModel model;
    const double shape =
        n_antennas * cfg.lambda_a * M_PI * cfg.r0_km * cfg.r0_km;
    int covered = 0;
    for (int i = 0; i < strata; ++i) {
        const double r = cfg.r0_km * std::sqrt((i + 0.5) / strata);
        const double p = analysis::pooled_error_probability(
            shape, theta, model.beta(r), cfg.epsilon);
        if (p <= cfg.p0) ++covered;
    }
    return static_cast<double>(covered) / strata;
}

double smallcell_coverage_mc(const ExperimentConfig& cfg, int n_antennas,
                             double theta, int strata) {
    const geometry::PathLossModel model;
    int covered = 0;
    for (int i = 0; i < strata; ++i) {
        const double u = (i + 0.5) / strata;
        const double r =
            std::sqrt(-std::log1p(-u) / (cfg.lambda_a * M_PI));
        const double p = analysis::pooled_error_probability(
            n_antennas, theta, model.beta(std::max(r, 1e-6)), cfg.epsilon);
        if (p <= cfg.p0) ++covered;
    }
    return static_cast<double>(covered) / strata;
}

void run_fig2(const ExperimentConfig& cfg, const std::string& out_path) {
    const RefLink link = build_ref_link(cfg);
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "fig2");
    out << "n_antennas,p_error_closed,p_error_empirical,stderr_empirical,"
           "active_trials,inactive_trials\n";
    for (int n : {1, 2, 4, 8}) {
        const auto pt = evaluate_link(cfg, link, cfg.tau, n,
                                      static_cast<std::uint64_t>(n));
        out << n << ',' << pt.p_closed << ',' << pt.p_empirical << ','
            << pt.stderr_empirical << ',' << pt.active_trials << ','
            << pt.inactive_trials << '\n';
    }
}

void run_fig3(const ExperimentConfig& cfg, const std::string& out_path) {
    const RefLink link = build_ref_link(cfg);
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "fig3");
    out << "tau_symbols,p_error_closed,p_error_empirical,stderr_empirical,"
           "active_trials,inactive_trials\n";
    for (int tau : {40, 60, 80, 100, 120, 140}) {
        const auto pt = evaluate_link(cfg, link, tau, cfg.n_antennas,
                                      1000 + static_cast<std::uint64_t>(tau));
        out << tau << ',' << pt.p_closed << ',' << pt.p_empirical << ','
            << pt.stderr_empirical << ',' << pt.active_trials << ','
            << pt.inactive_trials << '\n';
    }
}

struct MseScenario {
    std::string name;
    std::vector<int> detected;
    std::vector<int> missed;
    std::vector<int> false_alarms;  // subset of detected
};

// Deterministic active support: spread uniformly through the gain profile.
std::vector<int> spread_actives(int count, int actives) {
    std::vector<int> idx;
    for (int j = 0; j < actives; ++j) {
        idx.push_back(static_cast<int>((j + 0.5) * count / actives));
    }
    return idx;
}

void run_fig4(const ExperimentConfig& cfg, const std::string& out_path) {
    const geometry::PathLossModel model;
    const int count = cfg.ref_devices_per_ap;
    const double energy = cfg.energy();
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "fig4");
    out << "ap_index,distance_km,scenario,target_beta,e_closed,e_empirical,"
           "trials\n";

    const int n_active = std::max(2, static_cast<int>(
                                         std::lround(cfg.epsilon * count)));
    for (std::size_t a = 0; a < cfg.ref_ap_distances_km.size(); ++a) {
        // Target device at the AP's distance in slot 0, quantile profile
        // filling the rest of the covered population.
        VectorXd betas(count);
        betas[0] = model.beta(cfg.ref_ap_distances_km[a]);
        betas.tail(count - 1) =
            analysis::quantile_betas(model, cfg.r0_km, count - 1);
        const int target = 0;
        std::vector<int> actives = {target};
        for (int k : spread_actives(count - 1, n_active - 1)) {
            actives.push_back(1 + k);
        }

        std::vector<MseScenario> scenarios;
        scenarios.push_back({"perfect", actives, {}, {}});
        {
            MseScenario s{"one_missed", actives, {}, {}};
            const int victim = actives.back() == target
                                   ? actives[actives.size() - 2]
                                   : actives.back();
            s.detected.erase(std::remove(s.detected.begin(), s.detected.end(),
                                         victim),
                             s.detected.end());
            s.missed.push_back(victim);
            scenarios.push_back(std::move(s));
        }
        {
            MseScenario s{"one_false", actives, {}, {}};
            int impostor = 1;  // strongest profile device not actually active
            while (std::find(actives.begin(), actives.end(), impostor) !=
                   actives.end()) {
                ++impostor;
            }
            s.detected.push_back(impostor);
            s.false_alarms.push_back(impostor);
            scenarios.push_back(std::move(s));
        }

        for (std::size_t sidx = 0; sidx < scenarios.size(); ++sidx) {
            const auto& sc = scenarios[sidx];
            VectorXd others(static_cast<Eigen::Index>(sc.detected.size()) - 1);
            std::vector<int> false_pos;
            Eigen::Index w = 0;
            for (int k : sc.detected) {
                if (k == target) continue;
                if (std::find(sc.false_alarms.begin(), sc.false_alarms.end(),
                              k) != sc.false_alarms.end()) {
                    false_pos.push_back(static_cast<int>(w));
                }
                others[w++] = betas[k];
            }
            VectorXd missed_betas(
                static_cast<Eigen::Index>(sc.missed.size()));
            for (std::size_t i = 0; i < sc.missed.size(); ++i) {
                missed_betas[static_cast<Eigen::Index>(i)] =
                    betas[sc.missed[i]];
            }
            const double e_closed = analysis::asymptotic_mse(
                betas[target], others, missed_betas, false_pos, energy,
                cfg.tau);

            double e_sum = 0.0;
            std::vector<std::uint8_t> activity(
                static_cast<std::size_t>(count), 0);
            for (int k : actives) activity[static_cast<std::size_t>(k)] = 1;
            for (int t = 0; t < cfg.trials; ++t) {
                auto rng = make_rng(cfg.master_seed, kStreamMse,
                                    (a * 8 + sidx) * 100000 +
                                        static_cast<std::uint64_t>(t));
                const MatrixXcd pilots =
                    signal::generate_pilots(cfg.tau, count, rng);
                const auto sig = signal::synthesize_received(
                    pilots, betas, activity, energy, cfg.n_antennas, rng);
                const MatrixXcd est = lmmse::lmmse_estimate(
                    pilots, betas, sc.detected, sig.received, energy);
                e_sum += (sig.channels.row(target) - est.row(target))
                             .squaredNorm() /
                         cfg.n_antennas;
            }
            out << a << ',' << cfg.ref_ap_distances_km[a] << ',' << sc.name
                << ',' << betas[target] << ',' << e_closed << ','
                << e_sum / cfg.trials << ',' << cfg.trials << '\n';
        }
    }
}

void run_fig5(const ExperimentConfig& cfg, const std::string& out_path) {
    const double theta = network_theta(cfg, cfg.n_antennas);
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "fig5");
    out << "r1_km,mean_p_error,p95_p_error,realizations\n";
    for (double r1 : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}) {
        std::vector<double> ps;
        ps.reserve(static_cast<std::size_t>(cfg.realizations));
        for (int t = 0; t < cfg.realizations; ++t) {
            auto rng = make_rng(cfg.master_seed, kStreamGeom,
                                static_cast<std::uint64_t>(t));
            ps.push_back(geometry_p_error(cfg, cfg.lambda_a, r1,
                                          cfg.n_antennas, theta,
                                          analysis::WeightStrategy::equal,
                                          rng));
        }
        std::sort(ps.begin(), ps.end());
        const double mean =
            std::accumulate(ps.begin(), ps.end(), 0.0) / ps.size();
        const double p95 = ps[static_cast<std::size_t>(
            std::min<double>(ps.size() - 1, 0.95 * ps.size()))];
        out << r1 << ',' << mean << ',' << p95 << ',' << cfg.realizations
            << '\n';
    }
}

void run_fig6(const ExperimentConfig& cfg, const std::string& out_path) {
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "fig6");
    out << "lambda_a_per_km2,n_antennas,p_error,cdf\n";
    const std::vector<std::pair<double, int>> settings = {{2.0, 5}, {5.0, 2}};
    for (const auto& [lambda_a, n] : settings) {
        const double theta = network_theta(cfg, n);
        std::vector<double> ps;
        for (int t = 0; t < cfg.realizations; ++t) {
            auto rng = make_rng(cfg.master_seed, kStreamGeom,
                                static_cast<std::uint64_t>(t));
            ps.push_back(geometry_p_error(cfg, lambda_a, cfg.r1_km, n, theta,
                                          analysis::WeightStrategy::equal,
                                          rng));
        }
        std::sort(ps.begin(), ps.end());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            out << lambda_a << ',' << n << ',' << ps[i] << ','
                << static_cast<double>(i + 1) / ps.size() << '\n';
        }
    }
}

void run_fig7(const ExperimentConfig& cfg, const std::string& out_path) {
    const geometry::PathLossModel model;
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "fig7");
    out << "n_antennas,cov_cellfree,cov_cellfree_stderr,"
           "cov_collocated_closed,cov_collocated_mc,"
           "cov_smallcell_closed,cov_smallcell_mc\n";
    const double ap_equiv = cfg.lambda_a * M_PI * cfg.r0_km * cfg.r0_km;
    for (int n = 1; n <= 8; ++n) {
        const double theta = network_theta(cfg, n);
        analysis::CoverageMcConfig mc;
        mc.lambda_a = cfg.lambda_a;
        mc.r1_km = cfg.r1_km;
        mc.n_antennas = n;
        mc.epsilon = cfg.epsilon;
        mc.theta = theta;
        mc.p0 = cfg.p0;
        mc.grid_resolution = cfg.grid_resolution;
        const auto cellfree = analysis::coverage_cellfree_mc(
            mc, model, parse_strategy(cfg.weight_strategy), cfg.realizations,
            derive_seed(cfg.master_seed, kStreamCoverage,
                        static_cast<std::uint64_t>(n)));
        const auto cm = analysis::coverage_collocated(
            n, ap_equiv, theta, cfg.epsilon, cfg.p0, model, cfg.r0_km);
        const auto sc = analysis::coverage_smallcell(
            n, theta, cfg.epsilon, cfg.p0, cfg.lambda_a, model, cfg.r0_km);
        out << n << ',' << cellfree.coverage << ',' << cellfree.stderr_est
            << ',' << cm.coverage << ','
            << collocated_coverage_mc(cfg, n, theta, cfg.realizations) << ','
            << sc.coverage << ','
            << smallcell_coverage_mc(cfg, n, theta, cfg.realizations) << '\n';
    }
}

}  // namespace

double ExperimentConfig::noise_power_dbm() const {
    return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
}

double ExperimentConfig::rho() const {
    return std::pow(10.0, (tx_power_dbm - noise_power_dbm()) / 10.0);
}

double ExperimentConfig::energy() const { return tau * rho(); }

void ExperimentConfig::validate() const {
    std::vector<std::string> faults;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) faults.push_back(msg);
    };
    require(bandwidth_hz > 0, "bandwidth_hz must be positive");
    require(lambda_a > 0, "lambda_a must be positive");
    require(lambda_d > 0, "lambda_d must be positive");
    require(r0_km > 0, "r0_km must be positive");
    require(r1_km > 0, "r1_km must be positive");
    require(r1_km <= r0_km, "r1_km must not exceed r0_km");
    require(window_km >= 2 * r0_km, "window_km must cover the disk diameter");
    require(tau > 0, "tau must be positive");
    require(epsilon >= 0 && epsilon <= 1, "epsilon must lie in [0,1]");
    require(n_antennas > 0, "n_antennas must be positive");
    require(amp_iterations > 0, "amp_iterations must be positive");
    require(p0 > 0 && p0 <= 1, "p0 must lie in (0,1]");
    require(grid_resolution >= 2, "grid_resolution must be at least 2");
    require(ref_devices_per_ap > 1, "ref_devices_per_ap must exceed 1");
    require(!ref_ap_distances_km.empty(), "ref_ap_distances_km is empty");
    for (double d : ref_ap_distances_km) {
        require(d > 0 && d <= r1_km,
                "ref_ap_distances_km entries must lie in (0, r1_km]");
    }
    require(se_mc_samples > 0, "se_mc_samples must be positive");
    require(se_profile_points > 0, "se_profile_points must be positive");
    require(trials > 0, "trials must be positive");
    require(realizations > 0, "realizations must be positive");
    parse_strategy(weight_strategy);
    if (!faults.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& f : faults) msg += "\n  - " + f;
        throw std::invalid_argument(msg);
    }
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    for (const auto& [key, value] : j.items()) {
        if (key == "tx_power_dbm") cfg.tx_power_dbm = value;
        else if (key == "bandwidth_hz") cfg.bandwidth_hz = value;
        else if (key == "noise_psd_dbm_hz") cfg.noise_psd_dbm_hz = value;
        else if (key == "lambda_a") cfg.lambda_a = value;
        else if (key == "lambda_d") cfg.lambda_d = value;
        else if (key == "r0_km") cfg.r0_km = value;
        else if (key == "r1_km") cfg.r1_km = value;
        else if (key == "window_km") cfg.window_km = value;
        else if (key == "tau") cfg.tau = value;
        else if (key == "epsilon") cfg.epsilon = value;
        else if (key == "n_antennas") cfg.n_antennas = value;
        else if (key == "amp_iterations") cfg.amp_iterations = value;
        else if (key == "p0") cfg.p0 = value;
        else if (key == "weight_strategy") cfg.weight_strategy = value;
        else if (key == "grid_resolution") cfg.grid_resolution = value;
        else if (key == "mixed_inactive_scale") cfg.mixed_inactive_scale = value;
        else if (key == "ref_devices_per_ap") cfg.ref_devices_per_ap = value;
        else if (key == "ref_ap_distances_km")
            cfg.ref_ap_distances_km = value.get<std::vector<double>>();
        else if (key == "se_mc_samples") cfg.se_mc_samples = value;
        else if (key == "se_profile_points") cfg.se_profile_points = value;
        else if (key == "trials") cfg.trials = value;
        else if (key == "realizations") cfg.realizations = value;
        else if (key == "master_seed") cfg.master_seed = value;
        else throw std::invalid_argument("unknown config key: " + key);
    }
    return cfg;
}

ExperimentConfig resolve_config(const std::string& path,
                                const CliOverrides& overrides) {
    ExperimentConfig cfg = load_config(path);
    if (overrides.seed) cfg.master_seed = *overrides.seed;
    if (overrides.trials) {
        cfg.trials = *overrides.trials;
        cfg.realizations = *overrides.trials;
    }
    cfg.validate();
    return cfg;
}

void run_figure(const std::string& figure_id, const ExperimentConfig& config,
                const std::string& out_path) {
    config.validate();
    if (figure_id == "fig2") run_fig2(config, out_path);
    else if (figure_id == "fig3") run_fig3(config, out_path);
    else if (figure_id == "fig4") run_fig4(config, out_path);
    else if (figure_id == "fig5") run_fig5(config, out_path);
    else if (figure_id == "fig6") run_fig6(config, out_path);
    else if (figure_id == "fig7") run_fig7(config, out_path);
    else throw std::invalid_argument("unknown figure id: " + figure_id);
}

void run_coverage(const ExperimentConfig& cfg, const std::string& out_path) {
    cfg.validate();
    const geometry::PathLossModel model;
    const double theta = network_theta(cfg, cfg.n_antennas);
    auto out = open_csv(out_path);
    write_metadata(out, cfg, "coverage");
    out << "scheme,coverage,stderr\n";
    analysis::CoverageMcConfig mc;
    mc.lambda_a = cfg.lambda_a;
    mc.r1_km = cfg.r1_km;
    mc.n_antennas = cfg.n_antennas;
    mc.epsilon = cfg.epsilon;
    mc.theta = theta;
    mc.p0 = cfg.p0;
    mc.grid_resolution = cfg.grid_resolution;
    const char* names[] = {"cellfree_equal", "cellfree_smallcell",
                           "cellfree_optimal"};
    const analysis::WeightStrategy strategies[] = {
        analysis::WeightStrategy::equal, analysis::WeightStrategy::smallcell,
        analysis::WeightStrategy::optimal};
    for (int i = 0; i < 3; ++i) {
        const auto res = analysis::coverage_cellfree_mc(
            mc, model, strategies[i], cfg.realizations,
            derive_seed(cfg.master_seed, kStreamCoverage, 100));
        out << names[i] << ',' << res.coverage << ',' << res.stderr_est
            << '\n';
    }
    const double ap_equiv = cfg.lambda_a * M_PI * cfg.r0_km * cfg.r0_km;
    const auto cm = analysis::coverage_collocated(
        cfg.n_antennas, ap_equiv, theta, cfg.epsilon, cfg.p0, model,
        cfg.r0_km);
    const auto sc = analysis::coverage_smallcell(
        cfg.n_antennas, theta, cfg.epsilon, cfg.p0, cfg.lambda_a, model,
        cfg.r0_km);
    out << "collocated_closed," << cm.coverage << ",0\n";
    out << "smallcell_closed," << sc.coverage << ",0\n";
}

void run_selftest(const ExperimentConfig& config, const std::string& out_dir) {
    ExperimentConfig cfg = config;
    cfg.trials = std::min(cfg.trials, 40);
    cfg.realizations = std::min(cfg.realizations, 60);
    cfg.se_mc_samples = std::min(cfg.se_mc_samples, 400);
    cfg.ref_devices_per_ap = std::min(cfg.ref_devices_per_ap, 80);
    cfg.amp_iterations = std::min(cfg.amp_iterations, 6);
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    const RefLink link = build_ref_link(cfg);
    {
        auto out = open_csv(
            (std::filesystem::path(out_dir) / "selftest_detection.csv")
                .string());
        write_metadata(out, cfg, "selftest_detection");
        out << "n_antennas,p_error_closed,p_error_empirical\n";
        for (int n : {1, 2}) {
            const auto pt = evaluate_link(cfg, link, cfg.tau, n,
                                          static_cast<std::uint64_t>(n));
            out << n << ',' << pt.p_closed << ',' << pt.p_empirical << '\n';
        }
    }
    {
        const geometry::PathLossModel model;
        const double theta = network_theta(cfg, cfg.n_antennas);
        analysis::CoverageMcConfig mc;
        mc.lambda_a = cfg.lambda_a;
        mc.r1_km = cfg.r1_km;
        mc.n_antennas = cfg.n_antennas;
        mc.epsilon = cfg.epsilon;
        mc.theta = theta;
        mc.p0 = cfg.p0;
        mc.grid_resolution = cfg.grid_resolution;
        const auto res = analysis::coverage_cellfree_mc(
            mc, model, analysis::WeightStrategy::equal, cfg.realizations,
            derive_seed(cfg.master_seed, kStreamCoverage, 7));
        auto out = open_csv(
            (std::filesystem::path(out_dir) / "selftest_coverage.csv")
                .string());
        write_metadata(out, cfg, "selftest_coverage");
        out << "scheme,coverage,stderr\n";
        out << "cellfree_equal," << res.coverage << ',' << res.stderr_est
            << '\n';
    }
}

}  // namespace cfiot::experiments
