#include "qerf/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "qerf/dataset.hpp"
#include "qerf/errors.hpp"
#include "qerf/math.hpp"
#include "qerf/matching.hpp"
#include "qerf/parallel.hpp"

namespace qerf {

Scenario scenario_by_id(char id) {
    switch (id) {
        case 'A':
            return {'A', 0.0, NoiseKind::Gaussian5, NoiseKind::Gaussian5};
        case 'B':
            return {'B', 0.0, NoiseKind::StudentT2, NoiseKind::StudentT3x3};
        case 'C':
            return {'C', 0.0, NoiseKind::StudentT2, NoiseKind::LogNormal};
        case 'D':
            return {'D', 0.15, NoiseKind::StudentT2, NoiseKind::ChiSq3x2};
        default:
            throw Error(std::string("unknown scenario '") + id + "'");
    }
}

namespace {

double draw_noise(NoiseKind kind, std::mt19937_64& rng, const DgpOptions& opts) {
    switch (kind) {
        case NoiseKind::Gaussian5: {
            const double sd = opts.gaussian_scale_is_variance ? std::sqrt(5.0) : 5.0;
            return std::normal_distribution<double>(0.0, sd)(rng);
        }
        case NoiseKind::StudentT2:
            return std::student_t_distribution<double>(2.0)(rng);
        case NoiseKind::StudentT3x3:
            return 3.0 * std::student_t_distribution<double>(3.0)(rng);
        case NoiseKind::LogNormal: {
            const double sigma = opts.lognormal_scale_is_sd ? 4.5 : std::sqrt(4.5);
            return std::lognormal_distribution<double>(2.1, sigma)(rng);
        }
        case NoiseKind::ChiSq3x2:
            return 2.0 * std::chi_squared_distribution<double>(3.0)(rng);
    }
    throw Error("unreachable noise kind");
}

Eigen::VectorXd draw_covariates(std::mt19937_64& rng, const DgpOptions& opts) {
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    Eigen::VectorXd c(6);
    for (int k = 0; k < 4; ++k) c[k] = stdnorm(rng);
    if (opts.discrete_two_point) {
        c[4] = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -2.0 : 2.0;
    } else {
        c[4] = static_cast<double>(std::uniform_int_distribution<int>(-2, 2)(rng));
    }
    c[5] = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    return c;
}

constexpr double kGamma[6] = {0.1, 0.1, -0.1, 0.2, 0.1, 0.1};
constexpr double kBeta[6] = {2.0, 2.0, 3.0, -1.0, 2.0, 2.0};

double dgp_exposure_mean(const Eigen::VectorXd& c) {
    double g = -0.8;
    for (int k = 0; k < 6; ++k) g += kGamma[k] * c[k];
    return g;
}

}  // namespace

double dgp_outcome(const Scenario& s, double w, const Eigen::VectorXd& c, double eps_y) {
    double lin = 0.0;
    for (int k = 0; k < 6; ++k) lin += kBeta[k] * c[k];
    const double slope = 0.1 - 0.1 * c[0] + 0.1 * c[3] + 0.1 * c[4] + 0.1 * c[2] * c[2];
    return -1.0 - lin - w * slope + 0.13 * 0.13 * w * w * w + (1.0 + s.alpha * w) * eps_y;
}

ObservationalDataset generate_scenario(const Scenario& s, Eigen::Index n, std::uint64_t seed,
                                       const DgpOptions& opts) {
    if (n < 1) throw Error("generate_scenario: N must be >= 1");
    std::mt19937_64 rng(seed);
    ObservationalDataset ds;
    ds.exposure.resize(n);
    ds.outcome.resize(n);
    ds.unit_weight = Eigen::VectorXd::Ones(n);
    ds.covariates.resize(n, 6);
    ds.covariate_names = {"c1", "c2", "c3", "c4", "c5", "c6"};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd c = draw_covariates(rng, opts);
        const double eps_w = draw_noise(s.exposure_noise, rng, opts);
        const double w = opts.scaled_exposure ? 9.0 * dgp_exposure_mean(c) + 17.0 + eps_w
                                              : dgp_exposure_mean(c) + eps_w;
        const double eps_y = draw_noise(s.outcome_noise, rng, opts);
        ds.covariates.row(i) = c.transpose();
        ds.exposure[i] = w;
        ds.outcome[i] = dgp_outcome(s, w, c, eps_y);
    }
    return ds;
}

std::vector<QuantileCurve> true_qerf(const Scenario& s, const Eigen::VectorXd& grid,
                                     const std::vector<double>& taus, Eigen::Index R,
                                     std::uint64_t seed, const DgpOptions& opts) {
    if (R < 2) throw Error("true_qerf: R too small");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd c(R, 6);
    Eigen::VectorXd eps(R);
    for (Eigen::Index r = 0; r < R; ++r) {
        c.row(r) = draw_covariates(rng, opts).transpose();
        eps[r] = draw_noise(s.outcome_noise, rng, opts);
    }
    std::vector<QuantileCurve> curves(taus.size());
    for (std::size_t t = 0; t < taus.size(); ++t) {
        curves[t].tau = taus[t];
        curves[t].grid = grid;
        curves[t].kind = CurveKind::Empirical;
        curves[t].estimate.resize(grid.size());
    }
    std::vector<double> y(static_cast<std::size_t>(R));
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        for (Eigen::Index r = 0; r < R; ++r)
            y[static_cast<std::size_t>(r)] = dgp_outcome(s, grid[g], c.row(r).transpose(), eps[r]);
        std::sort(y.begin(), y.end());
        for (std::size_t t = 0; t < taus.size(); ++t) {
            // inf convention: smallest order statistic with i/R >= tau
            auto idx = static_cast<std::size_t>(std::ceil(taus[t] * static_cast<double>(R))) - 1;
            idx = std::min(idx, y.size() - 1);
            curves[t].estimate[g] = y[idx];
        }
    }
    return curves;
}

Eigen::VectorXd scenario_grid(const Scenario& s, std::uint64_t seed, int points, double lo,
                              double hi, const DgpOptions& opts) {
    const ObservationalDataset pilot = generate_scenario(s, 100000, seed, opts);
    const double wlo = weighted_quantile(pilot.exposure, pilot.unit_weight, lo);
    const double whi = weighted_quantile(pilot.exposure, pilot.unit_weight, hi);
    Eigen::VectorXd grid(points);
    for (int g = 0; g < points; ++g)
        grid[g] = wlo + (whi - wlo) * g / (points - 1.0);
    return grid;
}

Eigen::VectorXd iptw_weights(const ObservationalDataset& ds, const GpsModel& gps,
                             const MarginalDensity& md) {
    const Eigen::VectorXd e = evaluate_gps_all(gps, ds);
    Eigen::VectorXd s(ds.n_units());
    for (Eigen::Index j = 0; j < ds.n_units(); ++j) {
        if (e[j] < 1e-300) throw GpsUnderflow("GPS underflow in IPTW weight");
        s[j] = evaluate_marginal(md, ds.exposure[j]) / e[j];
    }
    return s;
}

QuantileCurve iptw_qerf(const ObservationalDataset& ds, const GpsModel& gps,
                        const MarginalDensity& md, const Eigen::VectorXd& grid, double tau,
                        double h) {
    const Eigen::VectorXd s = iptw_weights(ds, gps, md);
    QuantileCurve curve;
    curve.tau = tau;
    curve.grid = grid;
    curve.kind = CurveKind::Smoothed;
    curve.estimate = kernel_quantile_curve(ds.exposure, ds.outcome,
                                           s.cwiseProduct(ds.unit_weight), grid, tau, h);
    return curve;
}

std::string estimator_name(Estimator e) {
    switch (e) {
        case Estimator::Matching:
            return "matching";
        case Estimator::MatchingSmooth:
            return "matching-s";
        case Estimator::Iptw:
            return "iptw";
    }
    return "?";
}

namespace {

// Per-rep estimates: [estimator][tau] -> curve over the grid.
using RepEstimates = std::vector<std::vector<Eigen::VectorXd>>;

RepEstimates run_one_rep(const Scenario& s, Eigen::Index n, std::uint64_t rep_seed,
                         const Eigen::VectorXd& grid, const BenchmarkConfig& cfg) {
    ObservationalDataset ds = generate_scenario(s, n, rep_seed, cfg.dgp);
    if (cfg.trim_lo > 0.0 || cfg.trim_hi < 1.0) ds = trim_exposure(ds, cfg.trim_lo, cfg.trim_hi);
    const GpsModel gps = fit_linear_gps(ds);
    const TuneResult tuned =
        tune_hyperparameters(ds, gps, paper_delta_grid(), paper_lambda_grid(), 1);
    const MatchedDataset matched = match_templates(ds, gps, tuned.config, 1);
    const ExposureRange range = exposure_range(ds);
    const std::vector<double> h_grid = default_h_grid(range.w_max - range.w_min);

    const bool need_smooth =
        std::find(cfg.estimators.begin(), cfg.estimators.end(), Estimator::MatchingSmooth) !=
        cfg.estimators.end();
    const bool need_iptw = std::find(cfg.estimators.begin(), cfg.estimators.end(),
                                     Estimator::Iptw) != cfg.estimators.end();

    double h_mean_matched = 0.0;
    if (need_smooth) h_mean_matched = select_bandwidth_mean(matched, h_grid);

    MarginalDensity md;
    Eigen::VectorXd s_weights;
    double h_mean_iptw = 0.0;
    if (need_iptw) {
        md = fit_marginal_density(ds);
        s_weights = iptw_weights(ds, gps, md).cwiseProduct(ds.unit_weight);
        h_mean_iptw = select_bandwidth_mean(ds.exposure, ds.outcome, s_weights, h_grid);
    }

    RepEstimates out(cfg.estimators.size(),
                     std::vector<Eigen::VectorXd>(cfg.taus.size()));
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
            const double tau = cfg.taus[t];
            switch (cfg.estimators[e]) {
                case Estimator::Matching:
                    out[e][t] = qerf_empirical_curve(matched, grid, tau).estimate;
                    break;
                case Estimator::MatchingSmooth:
                    out[e][t] =
                        qerf_smooth(matched, grid, tau, adjust_bandwidth(h_mean_matched, tau))
                            .estimate;
                    break;
                case Estimator::Iptw:
                    out[e][t] = kernel_quantile_curve(ds.exposure, ds.outcome, s_weights, grid,
                                                      tau, adjust_bandwidth(h_mean_iptw, tau).h_tau);
                    break;
            }
        }
    }
    return out;
}

struct ErrorAccumulator {
    Eigen::VectorXd sum_err;
    Eigen::VectorXd sum_sq;
    int reps = 0;

    explicit ErrorAccumulator(Eigen::Index g)
        : sum_err(Eigen::VectorXd::Zero(g)), sum_sq(Eigen::VectorXd::Zero(g)) {}

    void add(const Eigen::VectorXd& err) {
        sum_err += err;
        sum_sq += err.cwiseAbs2();
        ++reps;
    }

    double ab() const { return (sum_err / reps).cwiseAbs().mean(); }
    double rmse() const { return std::sqrt((sum_sq / reps).mean()); }
};

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.reps < 1) throw Error("run_benchmark: reps must be >= 1");
    BenchmarkResult result;
    int total_reps = 0;

    for (const char sid : cfg.scenarios) {
        const Scenario s = scenario_by_id(sid);
        const std::uint64_t scen_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(sid));
        const Eigen::VectorXd grid =
            scenario_grid(s, mix_seed(scen_seed, 0), cfg.grid_points, 0.05, 0.95, cfg.dgp);
        const std::vector<QuantileCurve> truth =
            true_qerf(s, grid, cfg.taus, cfg.truth_draws, mix_seed(scen_seed, 1), cfg.dgp);

        for (const Eigen::Index n : cfg.sample_sizes) {
            const std::uint64_t block_seed = mix_seed(scen_seed, static_cast<std::uint64_t>(n));
            std::vector<RepEstimates> reps(static_cast<std::size_t>(cfg.reps));
            std::vector<char> ok(static_cast<std::size_t>(cfg.reps), 0);
            parallel_for(static_cast<std::size_t>(cfg.reps), cfg.workers, [&](std::size_t r) {
                try {
                    reps[r] = run_one_rep(s, n, mix_seed(block_seed, r + 2), grid, cfg);
                    ok[r] = 1;
                } catch (const Error&) {
                    ok[r] = 0;
                }
            });

            const Eigen::Index g = grid.size();
            for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
                std::vector<ErrorAccumulator> acc_qerf(cfg.taus.size(), ErrorAccumulator(g));
                std::vector<ErrorAccumulator> acc_qee(cfg.taus.size(), ErrorAccumulator(g - 1));
                for (std::size_t r = 0; r < reps.size(); ++r) {
                    if (!ok[r]) continue;
                    for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
                        const Eigen::VectorXd err = reps[r][e][t] - truth[t].estimate;
                        acc_qerf[t].add(err);
                        const Eigen::VectorXd est_diff =
                            reps[r][e][t].tail(g - 1) - reps[r][e][t].head(g - 1);
                        const Eigen::VectorXd truth_diff =
                            truth[t].estimate.tail(g - 1) - truth[t].estimate.head(g - 1);
                        acc_qee[t].add(est_diff - truth_diff);
                    }
                }
                if (acc_qerf[0].reps == 0) continue;
                double ab_avg = 0.0, rmse_avg = 0.0, ab_qee_avg = 0.0, rmse_qee_avg = 0.0;
                for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
                    result.qerf.push_back({sid, n, cfg.estimators[e], cfg.taus[t],
                                           acc_qerf[t].ab(), acc_qerf[t].rmse(),
                                           acc_qerf[t].reps});
                    result.qee.push_back({sid, n, cfg.estimators[e], cfg.taus[t], acc_qee[t].ab(),
                                          acc_qee[t].rmse(), acc_qee[t].reps});
                    ab_avg += acc_qerf[t].ab();
                    rmse_avg += acc_qerf[t].rmse();
                    ab_qee_avg += acc_qee[t].ab();
                    rmse_qee_avg += acc_qee[t].rmse();
                }
                const auto nt = static_cast<double>(cfg.taus.size());
                const double nan = std::numeric_limits<double>::quiet_NaN();
                result.qerf.push_back({sid, n, cfg.estimators[e], nan, ab_avg / nt, rmse_avg / nt,
                                       acc_qerf[0].reps});
                result.qee.push_back({sid, n, cfg.estimators[e], nan, ab_qee_avg / nt,
                                      rmse_qee_avg / nt, acc_qee[0].reps});
            }
            for (const char o : ok)
                if (!o) ++result.dropped_reps;
            total_reps += cfg.reps;
        }
    }
    if (result.dropped_reps * 10 > total_reps)
        throw ReplicateFailure("more than 10% of benchmark replications failed");
    return result;
}

namespace {

void write_cells(std::ostream& out, const std::vector<BenchmarkCell>& cells,
                 const std::string& target) {
    for (const auto& c : cells) {
        out << target << ',' << c.scenario << ',' << c.n << ',' << estimator_name(c.estimator)
            << ',';
        if (std::isnan(c.tau))
            out << "average";
        else
            out << c.tau;
        out << ',' << c.ab << ',' << c.rmse << ',' << c.reps << '\n';
    }
}

}  // namespace

void save_benchmark_csv(const BenchmarkResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(10);
    out << "target,scenario,n,estimator,tau,ab,rmse,reps\n";
    write_cells(out, result.qerf, "qerf");
    write_cells(out, result.qee, "qee");
}

std::string format_benchmark_table(const BenchmarkResult& result) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed;
    auto render = [&](const std::vector<BenchmarkCell>& cells, const std::string& title) {
        out << "== " << title << " (AB, RMSE in brackets) ==\n";
        char scen = 0;
        Eigen::Index n = -1;
        for (const auto& c : cells) {
            if (c.scenario != scen || c.n != n) {
                scen = c.scenario;
                n = c.n;
                out << "Scenario " << scen << ", N=" << n << '\n';
            }
            out << "  " << estimator_name(c.estimator) << " tau=";
            if (std::isnan(c.tau))
                out << "avg ";
            else
                out << c.tau << ' ';
            out << c.ab << " (" << c.rmse << ")  reps=" << c.reps << '\n';
        }
    };
    render(result.qerf, "QERF");
    render(result.qee, "QEE");
    return out.str();
}

}  // namespace qerf
