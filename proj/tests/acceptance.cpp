// Acceptance gate: end-to-end checks of the detection / estimation pipeline.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cfiot/amp.hpp"
#include "cfiot/analysis.hpp"
#include "cfiot/detection.hpp"
#include "cfiot/experiments.hpp"
#include "cfiot/geometry.hpp"
#include "cfiot/lmmse.hpp"
#include "cfiot/rng.hpp"
#include "cfiot/signal.hpp"
#include "cfiot/special.hpp"

namespace fs = std::filesystem;
using namespace cfiot;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

struct Csv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    double num(std::size_t row, const std::string& col) const {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] == col) return std::stod(rows[row][c]);
        }
        throw std::runtime_error("missing column: " + col);
    }
    std::string str(std::size_t row, const std::string& col) const {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] == col) return rows[row][c];
        }
        throw std::runtime_error("missing column: " + col);
    }
};

Csv read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (csv.columns.empty()) {
            csv.columns = std::move(fields);
        } else {
            csv.rows.push_back(std::move(fields));
        }
    }
    return csv;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "cfiot_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

// Converged residual level for a network-scale device population.
double converged_theta(const experiments::ExperimentConfig& cfg,
                       int n_antennas) {
    const geometry::PathLossModel model;
    const VectorXd profile =
        analysis::quantile_betas(model, cfg.r0_km, cfg.se_profile_points);
    const double device_count = cfg.lambda_d * M_PI * cfg.r0_km * cfg.r0_km;
    auto rng = make_rng(cfg.master_seed, 0x5345ULL,
                        static_cast<std::uint64_t>(n_antennas));
    amp::SeOptions opts;
    opts.mc_samples = cfg.se_mc_samples;
    return amp::state_evolution_fixed_point(cfg.energy(), cfg.epsilon, profile,
                                            device_count, cfg.tau, n_antennas,
                                            opts, rng);
}

// 1: closed-form fused error probability vs the full per-AP recovery +
// fusion pipeline across antenna counts.
bool criterion_detection_closed_vs_empirical(std::string& detail) {
    auto cfg = experiments::load_config("");
    cfg.trials = 1000;
    const fs::path out = work_dir() / "fig2.csv";
    experiments::run_figure("fig2", cfg, out.string());
    const Csv csv = read_csv(out);
    bool ok = !csv.rows.empty();
    std::ostringstream log;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const double closed = csv.num(r, "p_error_closed");
        const double emp = csv.num(r, "p_error_empirical");
        const double se = csv.num(r, "stderr_empirical");
        const double tol = std::max(0.01, 3.0 * se);
        const double gap = std::fabs(closed - emp);
        if (gap > tol) ok = false;
        log << " N=" << csv.str(r, "n_antennas") << " gap=" << gap
            << " tol=" << tol;
    }
    detail = log.str();
    return ok;
}

// 2: the residual-variance recursion tracks the per-iteration empirical
// error of the iterative recovery within 10%.
bool criterion_state_evolution_tracking(std::string& detail) {
    const auto cfg = experiments::load_config("");
    const geometry::PathLossModel model;
    const int devices = 200;
    const int n = cfg.n_antennas;
    const int iters = cfg.amp_iterations;
    const double energy = cfg.energy();
    const VectorXd betas = analysis::quantile_betas(model, cfg.r0_km, devices);

    auto se_rng = make_rng(3, 1);
    const auto schedule = amp::state_evolution_schedule(
        energy, cfg.epsilon, betas, devices, cfg.tau, n, iters,
        cfg.se_mc_samples, se_rng);

    const int trials = 200;
    std::vector<double> mse(static_cast<std::size_t>(iters) + 1, 0.0);
    amp::AmpOptions opts;
    opts.iterations = iters;
    opts.keep_history = true;
    for (int t = 0; t < trials; ++t) {
        auto rng = make_rng(3, 2, static_cast<std::uint64_t>(t));
        const auto activity = signal::sample_activity(cfg.epsilon, devices, rng);
        const MatrixXcd pilots = signal::generate_pilots(cfg.tau, devices, rng);
        const auto sig = signal::synthesize_received(pilots, betas, activity,
                                                     energy, n, rng);
        const auto res = amp::amp_run(sig.received, pilots, betas, energy,
                                      cfg.epsilon, schedule, opts);
        for (std::size_t i = 0; i < res.xhat_history.size(); ++i) {
            mse[i] += (res.xhat_history[i] - sig.sparse).squaredNorm() /
                      (static_cast<double>(devices) * n);
        }
    }
    bool ok = true;
    std::ostringstream log;
    for (int t = 1; t <= iters; ++t) {
        const double emp = mse[static_cast<std::size_t>(t)] / trials;
        const double pred = schedule[static_cast<std::size_t>(t)];
        const double rel = std::fabs(emp - pred) / pred;
        if (rel > 0.10) ok = false;
        if (t == 1 || t == iters) {
            log << " t=" << t << " rel=" << rel;
        }
    }
    detail = log.str();
    return ok;
}

// 3: closed-form per-device estimation error vs Monte Carlo under perfect,
// one-missed and one-false detection outcomes.
bool criterion_channel_error_closed_vs_empirical(std::string& detail) {
    auto cfg = experiments::load_config("");
    cfg.trials = 1000;
    const fs::path out = work_dir() / "fig4.csv";
    experiments::run_figure("fig4", cfg, out.string());
    const Csv csv = read_csv(out);
    bool ok = !csv.rows.empty();
    std::ostringstream log;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const double closed = csv.num(r, "e_closed");
        const double emp = csv.num(r, "e_empirical");
        const double rel = std::fabs(closed - emp) / closed;
        if (rel > 0.05) ok = false;
        log << ' ' << csv.str(r, "scenario") << "@" << csv.str(r, "ap_index")
            << " rel=" << rel;
    }
    detail = log.str();
    return ok;
}

// 4: coverage closed forms agree with stratified Monte Carlo and the
// distributed deployment dominates both baselines at every antenna count.
bool criterion_coverage(std::string& detail) {
    const auto cfg = experiments::load_config("");
    const fs::path out = work_dir() / "fig7.csv";
    experiments::run_figure("fig7", cfg, out.string());
    const Csv csv = read_csv(out);
    bool ok = !csv.rows.empty();
    std::ostringstream log;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const double cf = csv.num(r, "cov_cellfree");
        const double cf_se = csv.num(r, "cov_cellfree_stderr");
        const double cm = csv.num(r, "cov_collocated_closed");
        const double cm_mc = csv.num(r, "cov_collocated_mc");
        const double sc = csv.num(r, "cov_smallcell_closed");
        const double sc_mc = csv.num(r, "cov_smallcell_mc");
        const bool row_ok = std::fabs(cm - cm_mc) <= 0.02 &&
                            std::fabs(sc - sc_mc) <= 0.02 &&
                            cf >= cm - 2.0 * cf_se && cf >= sc - 2.0 * cf_se;
        if (!row_ok) {
            ok = false;
            log << " N=" << csv.str(r, "n_antennas") << " cf=" << cf
                << " cm=" << cm << "/" << cm_mc << " sc=" << sc << "/"
                << sc_mc;
        }
    }
    if (ok) log << " all antenna counts within 0.02 / dominated";
    detail = log.str();
    return ok;
}

// 5: densifying APs at fixed total antennas shortens the error tail: the
// 95th percentile at (2 APs/km^2, 5 antennas) is at least twice the one at
// (5 APs/km^2, 2 antennas).
bool criterion_density_tradeoff(std::string& detail) {
    const auto cfg = experiments::load_config("");
    const fs::path out = work_dir() / "fig6.csv";
    experiments::run_figure("fig6", cfg, out.string());
    const Csv csv = read_csv(out);
    std::map<std::pair<double, int>, double> p95;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto key = std::make_pair(
            csv.num(r, "lambda_a_per_km2"),
            static_cast<int>(csv.num(r, "n_antennas")));
        if (!p95.count(key) && csv.num(r, "cdf") >= 0.95) {
            p95[key] = csv.num(r, "p_error");
        }
    }
    const double sparse = p95.at({2.0, 5});
    const double dense = p95.at({5.0, 2});
    std::ostringstream log;
    log << " p95(2/km2,5ant)=" << sparse << " p95(5/km2,2ant)=" << dense;
    detail = log.str();
    return sparse >= 2.0 * dense;
}

// 6: fused-statistic behaviour over random AP geometries: the error
// probability under grid-searched weights decreases with the antenna count
// and never increases when a further AP joins the cooperating set.
bool criterion_fusion_monotonicity(std::string& detail) {
    const auto cfg = experiments::load_config("");
    const geometry::PathLossModel model;
    const std::vector<int> antenna_counts = {1, 2, 4, 8, 16};
    std::map<int, double> theta_by_n;
    for (int n : antenna_counts) theta_by_n[n] = converged_theta(cfg, n);

    // Median device: nearest AP at the median nearest-AP distance; its
    // single-AP error must be deep below the target by 16 antennas.
    const double median_r =
        std::sqrt(std::log(2.0) / (cfg.lambda_a * M_PI));
    const double p_median = analysis::pooled_error_probability(
        16.0, theta_by_n.at(16), model.beta(median_r), cfg.epsilon);

    const int geometries = 20;
    const int grid = 12;
    const int cap = 8;
    const double beta_near = model.beta(0.5);
    bool ok = p_median < 1e-3;
    std::ostringstream log;
    if (!ok) log << " median-device p(N=16)=" << p_median;
    int produced = 0;
    std::uint64_t attempt = 0;
    while (produced < geometries) {
        auto rng = make_rng(6, 1, attempt++);
        std::poisson_distribution<int> count_dist(cfg.lambda_a * M_PI *
                                                  cfg.r1_km * cfg.r1_km);
        const int m = count_dist(rng);
        if (m < 1 || m > cap) continue;  // resample degenerate geometries
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> gains(static_cast<std::size_t>(m));
        for (auto& g : gains) {
            g = model.beta(std::max(cfg.r1_km * std::sqrt(unit(rng)), 1e-6));
        }
        std::sort(gains.begin(), gains.end(), std::greater<>());
        // The trend claims describe served devices; resample geometries whose
        // nearest cooperating AP is beyond 0.5 km (gain buried in the
        // residual noise, where the finite-N error is not yet monotone).
        if (gains[0] < beta_near) continue;
        ++produced;

        VectorXd betas = Eigen::Map<const VectorXd>(gains.data(), m);
        // (a) more antennas never hurt, and strictly help until saturation.
        double prev = 2.0;
        for (int n : antenna_counts) {
            const VectorXd thetas = VectorXd::Constant(m, theta_by_n[n]);
            const auto w = detection::weights_equal(m);
            const auto ws =
                analysis::ws_params(betas, thetas, w.weights, n);
            const double p =
                analysis::detection_error_closed_form(ws, cfg.epsilon).p_error;
            if (p > prev + 1e-15 || (prev > 1e-12 && p >= prev)) {
                ok = false;
                log << " geom" << produced << " N=" << n << " p=" << p
                    << " prev=" << prev;
            }
            prev = p;
        }
        // (b) nested strongest-first AP subsets at a fixed antenna count.
        const double theta = theta_by_n.at(4);
        prev = 2.0;
        for (int size = 1; size <= m; ++size) {
            const VectorXd sub = betas.head(size);
            const VectorXd thetas = VectorXd::Constant(size, theta);
            const auto w = detection::weights_optimal(sub, thetas, 4,
                                                      cfg.epsilon, grid);
            const auto ws = analysis::ws_params(sub, thetas, w.weights, 4);
            const double p =
                analysis::detection_error_closed_form(ws, cfg.epsilon).p_error;
            if (p > prev + 1e-12) {
                ok = false;
                log << " geom" << produced << " |set|=" << size << " p=" << p
                    << " prev=" << prev;
            }
            prev = p;
        }
    }
    if (ok) log << " " << geometries << " geometries, all monotone";
    detail = log.str();
    return ok;
}

// 7: numerical foundations: tail decay, complement identity, rank-one
// update identity, denoiser Jacobian, and trace concentration.
bool criterion_numerics(std::string& detail) {
    std::ostringstream log;
    bool ok = true;
    auto check = [&](bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << " FAILED:" << what;
        }
    };

    check(special::gamma_tail_ratio(500.0, 0.5, special::GammaSide::lower) < 1e-10,
          "lower-tail decay");
    check(special::gamma_tail_ratio(500.0, 2.0, special::GammaSide::upper) < 1e-10,
          "upper-tail decay");
    for (double s : {0.5, 3.0, 40.0, 800.0}) {
        for (double x : {0.1, 1.0, 10.0, 500.0}) {
            check(std::fabs(special::reg_lower_gamma(s, x) +
                            special::reg_upper_gamma(s, x) - 1.0) < 1e-12,
                  "complement identity");
        }
    }

    {  // rank-one update of the pilot covariance
        auto rng = make_rng(7, 1);
        const MatrixXcd pilots = signal::generate_pilots(16, 4, rng);
        const VectorXd betas = VectorXd::Constant(4, 1.3);
        const double energy = 2.0;
        const MatrixXcd z =
            lmmse::build_covariance(pilots, betas, {0, 1, 2}, energy);
        const MatrixXcd z_full =
            lmmse::build_covariance(pilots, betas, {0, 1, 2, 3}, energy);
        const MatrixXcd zi = z.inverse();
        const VectorXcd u = pilots.col(3);
        const double c = energy * betas[3];
        const std::complex<double> denom =
            1.0 + c * (u.adjoint() * zi * u)(0, 0);
        const MatrixXcd updated =
            zi - (c / denom) * (zi * u) * (u.adjoint() * zi);
        check((updated - z_full.inverse()).norm() < 1e-10 * updated.norm(),
              "rank-one inverse update");
    }

    {  // denoiser Jacobian vs central finite differences
        auto rng = make_rng(7, 2);
        VectorXcd xhat(3);
        xhat << std::complex<double>(0.7, -0.2), std::complex<double>(-1.1, 0.4),
            std::complex<double>(0.3, 0.9);
        const double beta = 1.5, theta = 0.4, eps = 0.1, h = 1e-6;
        const MatrixXcd jac = amp::denoiser_jacobian(xhat, beta, theta, eps);
        MatrixXcd fd(3, 3);
        for (int j = 0; j < 3; ++j) {
            VectorXcd xp = xhat, xm = xhat;
            xp[j] += h;
            xm[j] -= h;
            const VectorXcd d_re =
                (amp::denoise(xp, beta, theta, eps) -
                 amp::denoise(xm, beta, theta, eps)) /
                (2.0 * h);
            xp = xhat;
            xm = xhat;
            xp[j] += std::complex<double>(0.0, h);
            xm[j] -= std::complex<double>(0.0, h);
            const VectorXcd d_im =
                (amp::denoise(xp, beta, theta, eps) -
                 amp::denoise(xm, beta, theta, eps)) /
                (2.0 * h);
            fd.col(j) = 0.5 * (d_re - std::complex<double>(0.0, 1.0) * d_im);
        }
        check((jac - fd).norm() < 1e-5 * jac.norm(), "denoiser Jacobian");
    }

    {  // deterministic trace equivalents vs Monte Carlo at tau = 100
        const int tau = 100, devices = 10;
        const VectorXd betas = VectorXd::LinSpaced(devices, 0.2, 2.0);
        const double energy = 3.0;
        const auto de = analysis::deterministic_equivalents(betas, energy, tau);
        std::vector<int> all(devices);
        for (int i = 0; i < devices; ++i) all[i] = i;
        double mean_q = 0.0;
        const int draws = 40;
        for (int d = 0; d < draws; ++d) {
            auto rng = make_rng(7, 3, static_cast<std::uint64_t>(d));
            const MatrixXcd pilots = signal::generate_pilots(tau, devices, rng);
            const MatrixXcd z =
                lmmse::build_covariance(pilots, betas, all, energy);
            mean_q +=
                z.llt().solve(MatrixXcd::Identity(tau, tau)).real().trace() /
                tau;
        }
        mean_q /= draws;
        check(std::fabs(mean_q - de.q) < 0.02 * de.q, "trace concentration");
    }
    if (ok) log << " all identities hold";
    detail = log.str();
    return ok;
}

// 8: the reduced self-check run is byte-for-byte reproducible.
bool criterion_reproducibility(std::string& detail) {
    const auto cfg = experiments::load_config("");
    const fs::path a = work_dir() / "selftest_a";
    const fs::path b = work_dir() / "selftest_b";
    fs::create_directories(a);
    fs::create_directories(b);
    experiments::run_selftest(cfg, a.string());
    experiments::run_selftest(cfg, b.string());
    bool ok = true;
    for (const char* name :
         {"selftest_detection.csv", "selftest_coverage.csv"}) {
        const std::string left = slurp(a / name);
        ok = ok && !left.empty() && left == slurp(b / name);
    }
    detail = ok ? " identical bytes across runs" : " outputs differ";
    return ok;
}

}  // namespace

int main() {
    using Criterion = std::function<bool(std::string&)>;
    const std::vector<std::pair<std::string, Criterion>> criteria = {
        {"detection error: closed form vs end-to-end pipeline",
         criterion_detection_closed_vs_empirical},
        {"residual recursion tracks per-iteration recovery error",
         criterion_state_evolution_tracking},
        {"channel-error closed form vs Monte Carlo across outcomes",
         criterion_channel_error_closed_vs_empirical},
        {"coverage closed forms vs MC; distributed dominates baselines",
         criterion_coverage},
        {"antenna concentration inflates the 95th-percentile error",
         criterion_density_tradeoff},
        {"fused error monotone in antennas and cooperating-set size",
         criterion_fusion_monotonicity},
        {"numerical identities (tails, complements, updates, Jacobian)",
         criterion_numerics},
        {"reduced self-check is byte-for-byte reproducible",
         criterion_reproducibility},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].second(detail);
        } catch (const std::exception& e) {
            detail = std::string(" exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1)
                  << ": " << criteria[i].first << " --" << detail << std::endl;
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all 8 criteria passed" << std::endl;
    return 0;
}
