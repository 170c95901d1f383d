// qerf: matching-based estimation of quantile exposure-response functions.
//
// Subcommands: simulate, design, analyze, bench, bands. The design/analyze
// split keeps the matching (design) stage auditable before any outcome model
// is fitted.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qerf/dataset.hpp"
#include "qerf/errors.hpp"
#include "qerf/gps.hpp"
#include "qerf/inference.hpp"
#include "qerf/math.hpp"
#include "qerf/matching.hpp"
#include "qerf/parallel.hpp"
#include "qerf/quantile.hpp"
#include "qerf/simbench.hpp"
#include "qerf/svg.hpp"

namespace fs = std::filesystem;
using namespace qerf;

namespace {

struct IoOptions {
    std::string input;
    std::string exposure_col = "w";
    std::string outcome_col = "y";
    std::vector<std::string> covariate_cols;
    std::string weight_col;
    double trim_lo = 0.0;
    double trim_hi = 1.0;
};

void add_io_options(CLI::App* cmd, IoOptions& io) {
    cmd->add_option("--input", io.input, "input CSV file")->required();
    cmd->add_option("--exposure-col", io.exposure_col, "exposure column name");
    cmd->add_option("--outcome-col", io.outcome_col, "outcome column name");
    cmd->add_option("--covariate-cols", io.covariate_cols, "covariate column names")
        ->delimiter(',');
    cmd->add_option("--weight-col", io.weight_col, "optional population weight column");
    cmd->add_option("--trim-lo", io.trim_lo, "lower exposure trim fraction");
    cmd->add_option("--trim-hi", io.trim_hi, "upper exposure trim fraction");
}

ObservationalDataset load_dataset(const IoOptions& io) {
    ColumnMap schema;
    schema.exposure = io.exposure_col;
    schema.outcome = io.outcome_col;
    schema.covariates = io.covariate_cols;
    schema.weight = io.weight_col;
    ObservationalDataset ds = load_csv(io.input, schema);
    if (io.trim_lo > 0.0 || io.trim_hi < 1.0) ds = trim_exposure(ds, io.trim_lo, io.trim_hi);
    return ds;
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& kv) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.pop_back();
        };
        strip(key);
        strip(value);
        kv[key] = value;
    }
    return kv;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------- design ---

struct DesignArgs {
    IoOptions io;
    std::string out_dir = ".";
    double fixed_delta = 0.0;
    double fixed_lambda = -1.0;
    std::vector<double> delta_grid;
    std::vector<double> lambda_grid;
    int workers = default_workers();
    bool iptw_balance = false;
};

int cmd_design(const DesignArgs& a) {
    const ObservationalDataset ds = load_dataset(a.io);
    fs::create_directories(a.out_dir);
    const GpsModel gps = fit_linear_gps(ds);

    MatchConfig cfg{};
    Eigen::MatrixXd aac_grid;
    bool tuned = false;
    if (a.fixed_delta > 0.0 && a.fixed_lambda >= 0.0) {
        cfg = {a.fixed_delta, a.fixed_lambda};
    } else {
        const auto dg = a.delta_grid.empty() ? paper_delta_grid() : a.delta_grid;
        const auto lg = a.lambda_grid.empty() ? paper_lambda_grid() : a.lambda_grid;
        const TuneResult t = tune_hyperparameters(ds, gps, dg, lg, a.workers);
        cfg = t.config;
        aac_grid = t.aac_grid;
        tuned = true;
    }
    const MatchedDataset matched = match_templates(ds, gps, cfg, a.workers);
    const BalanceReport rep = balance_report(matched);
    const BalanceReport raw = balance_report_raw(ds);

    BalanceReport wrep;
    const BalanceReport* wptr = nullptr;
    if (a.iptw_balance) {
        const MarginalDensity md = fit_marginal_density(ds);
        wrep = balance_report_weighted(ds, iptw_weights(ds, gps, md).cwiseProduct(ds.unit_weight));
        wptr = &wrep;
    }

    const std::string dir = a.out_dir + "/";
    save_matched_csv(matched, dir + "matched.csv");
    save_balance_csv(rep, raw, ds.covariate_names, dir + "balance.csv", wptr);
    write_balance_svg(rep, raw, ds.covariate_names, dir + "balance.svg", wptr);
    save_gps(gps, dir + "gps.txt");

    const ExposureRange range = exposure_range(ds);
    std::map<std::string, std::string> manifest{
        {"delta", fmt(cfg.delta)},
        {"lambda", fmt(cfg.lambda)},
        {"w_min", fmt(range.w_min)},
        {"w_max", fmt(range.w_max)},
        {"levels", std::to_string(matched.n_levels())},
        {"matched_templates", std::to_string(matched.matched_template_count())},
        {"aac_matched", fmt(rep.aac)},
        {"aac_raw", fmt(raw.aac)},
        {"median_abs_corr_matched", fmt(rep.median_abs_corr)},
        {"tuned", tuned ? "yes" : "no (fixed)"},
        // The design stage never feeds the outcome into GPS fitting,
        // matching or balance; it is copied verbatim into matched.csv.
        {"outcome_role", "copy-only"},
    };
    if (tuned) {
        std::ostringstream g;
        g.precision(10);
        for (Eigen::Index i = 0; i < aac_grid.rows(); ++i)
            for (Eigen::Index j = 0; j < aac_grid.cols(); ++j)
                g << (i + j == 0 ? "" : " ") << aac_grid(i, j);
        manifest["aac_grid"] = g.str();
    }
    write_manifest(dir + "design_manifest.txt", manifest);
    std::cout << "design: delta=" << cfg.delta << " lambda=" << cfg.lambda
              << " AAC " << raw.aac << " -> " << rep.aac << '\n';
    return 0;
}

// --------------------------------------------------------------- analyze ---

/// Rebuilds a MatchedDataset from the design-stage exports. The source holds
/// only the matched units (K_j > 0); that is all the analysis stage needs.
MatchedDataset load_matched(const std::string& design_dir) {
    const auto manifest = read_manifest(design_dir + "/design_manifest.txt");
    MatchedDataset m;
    m.config.delta = std::stod(manifest.at("delta"));
    m.config.lambda = std::stod(manifest.at("lambda"));
    const double w_min = std::stod(manifest.at("w_min"));
    const double w_max = std::stod(manifest.at("w_max"));
    m.levels = make_bins({w_min, w_max}, m.config.delta);
    m.gps = load_gps(design_dir + "/gps.txt");

    std::ifstream in(design_dir + "/matched.csv");
    if (!in) throw Error("cannot open matched.csv in '" + design_dir + "'");
    std::string line;
    std::getline(in, line);  // header
    std::map<int, std::array<double, 4>> units;  // unit -> (y, w, weight, gps)
    std::map<int, int> counts;
    std::vector<std::vector<std::pair<int, int>>> by_level(m.levels.count());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 7) throw ParseFailure(row, "matched.csv");
        const int level = std::stoi(cells[0]);
        const int unit = std::stoi(cells[3]);
        units[unit] = {std::stod(cells[4]), std::stod(cells[5]), std::stod(cells[6]),
                       cells.size() > 7 ? std::stod(cells[7]) : 0.0};
        ++counts[unit];
        auto& lv = by_level.at(static_cast<std::size_t>(level));
        if (!lv.empty() && lv.back().first == unit)
            ++lv.back().second;
        else
            lv.emplace_back(unit, 1);
    }
    if (units.empty()) throw EmptyDataset("matched.csv has no rows");

    // Re-index units densely.
    std::map<int, int> dense;
    const auto n = static_cast<Eigen::Index>(units.size());
    ObservationalDataset& src = m.source;
    src.exposure.resize(n);
    src.outcome.resize(n);
    src.unit_weight.resize(n);
    src.covariates.resize(n, 0);
    m.gps_values.resize(n);
    m.k_count = Eigen::VectorXi::Zero(n);
    Eigen::Index i = 0;
    for (const auto& [unit, vals] : units) {
        dense[unit] = static_cast<int>(i);
        src.outcome[i] = vals[0];
        src.exposure[i] = vals[1];
        src.unit_weight[i] = vals[2];
        m.gps_values[i] = vals[3];
        m.k_count[i] = counts[unit];
        ++i;
    }
    m.k_count_by_level.resize(by_level.size());
    for (std::size_t l = 0; l < by_level.size(); ++l) {
        // collapse repeated (unit,count) runs emitted per template order
        std::map<int, int> agg;
        for (const auto& [unit, k] : by_level[l]) agg[dense[unit]] += k;
        for (const auto& [unit, k] : agg) m.k_count_by_level[l].emplace_back(unit, k);
    }
    return m;
}

struct AnalyzeArgs {
    std::string design_dir;
    std::string out_dir = ".";
    std::vector<double> taus = {0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95};
    int grid_points = 100;
    double h_mean = 0.0;  // 0 = select by LOO-CV
    double qee_increment = 1.0;
    int variance_m = 0;  // 0 = no variance table
    int bootstrap_b = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    bool have_seed = false;
    IoOptions io;  // original data, only needed for bootstrap
    bool have_input = false;
    int workers = default_workers();
};

int cmd_analyze(const AnalyzeArgs& a) {
    const MatchedDataset matched = load_matched(a.design_dir);
    fs::create_directories(a.out_dir);
    const std::string dir = a.out_dir + "/";

    const double w_min = matched.levels.levels[0] - matched.config.delta;
    const double w_max =
        matched.levels.levels[matched.n_levels() - 1] + matched.config.delta;
    Eigen::VectorXd grid(a.grid_points);
    for (int g = 0; g < a.grid_points; ++g)
        grid[g] = w_min + (w_max - w_min) * g / (a.grid_points - 1.0);

    double h_mean = a.h_mean;
    if (!(h_mean > 0.0))
        h_mean = select_bandwidth_mean(matched, default_h_grid(w_max - w_min));

    if (a.bootstrap_b > 0) {
        if (!a.have_input)
            throw Error("--bootstrap needs --input (the original CSV) to resample");
        if (!a.have_seed) throw Error("--bootstrap needs --seed");
    }

    std::vector<QuantileCurve> curves;
    std::vector<QuantileCurve> qee_curves;
    ObservationalDataset original;
    if (a.bootstrap_b > 0) original = load_dataset(a.io);

    for (const double tau : a.taus) {
        const BandwidthSpec h = adjust_bandwidth(h_mean, tau);
        QuantileCurve curve = qerf_smooth(matched, grid, tau, h);
        if (a.bootstrap_b > 0) {
            BootstrapPipeline pipe{matched.config, grid, tau, h};
            const BootstrapBands bands = bootstrap_bands(
                original, pipe, a.bootstrap_b, a.alpha, mix_seed(a.seed, static_cast<std::uint64_t>(tau * 1e6)),
                a.workers);
            curve.lower = bands.lower;
            curve.upper = bands.upper;
        }

        // QEE for the configured exposure increment; points whose w' falls
        // below the grid are omitted.
        QuantileCurve qc;
        qc.tau = tau;
        qc.kind = CurveKind::Smoothed;
        std::vector<double> qw, qv;
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
            const double w_prime = grid[g] - a.qee_increment;
            if (w_prime < w_min) continue;
            qw.push_back(grid[g]);
            qv.push_back(qee_smooth(matched, grid[g], w_prime, tau, h));
        }
        if (qw.empty()) {
            std::cerr << "note: QEE increment " << a.qee_increment
                      << " exceeds the grid span; QEE curve omitted for tau=" << tau << '\n';
        } else {
            qc.grid = Eigen::Map<Eigen::VectorXd>(qw.data(), static_cast<Eigen::Index>(qw.size()));
            qc.estimate =
                Eigen::Map<Eigen::VectorXd>(qv.data(), static_cast<Eigen::Index>(qv.size()));
            qee_curves.push_back(std::move(qc));
        }
        curves.push_back(std::move(curve));
    }

    save_curves_csv(curves, dir + "qerf.csv");
    write_curves_svg(curves, dir + "qerf.svg", "QERF");
    if (!qee_curves.empty()) {
        save_curves_csv(qee_curves, dir + "qee.csv");
        write_curves_svg(qee_curves, dir + "qee.svg", "QEE");
    }

    if (a.variance_m > 0) {
        std::vector<VarianceEstimate> estimates;
        std::vector<double> values;
        for (const double tau : a.taus)
            for (Eigen::Index g = 0; g < grid.size(); ++g) {
                try {
                    estimates.push_back(variance_qerf(matched, grid[g], tau, a.variance_m));
                    values.push_back(qerf_empirical(matched, grid[g], tau));
                } catch (const Error&) {
                    // grid points with empty windows or floor hits are skipped
                }
            }
        save_variance_csv(estimates, values, dir + "variance.csv");
    }
    std::cout << "analyze: wrote " << curves.size() << " QERF curves to " << a.out_dir << '\n';
    return 0;
}

// ----------------------------------------------------------------- bench ---

int cmd_bench(const BenchmarkConfig& cfg, const std::string& out_dir) {
    const BenchmarkResult result = run_benchmark(cfg);
    fs::create_directories(out_dir);
    save_benchmark_csv(result, out_dir + "/bench.csv");
    std::ofstream txt(out_dir + "/bench.txt");
    txt << format_benchmark_table(result);
    std::cout << format_benchmark_table(result);
    if (result.dropped_reps > 0)
        std::cerr << "warning: " << result.dropped_reps << " replications dropped\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matching-based quantile exposure-response estimation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value config file; CLI flags take precedence");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a benchmark scenario dataset");
    std::string sim_scenario = "A";
    Eigen::Index sim_n = 1000;
    std::uint64_t sim_seed = 0;
    std::string sim_out = "scenario.csv";
    DgpOptions dgp;
    sim->add_option("--scenario", sim_scenario, "A, B, C or D")->required();
    sim->add_option("--n", sim_n, "sample size")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--out", sim_out, "output CSV path");
    sim->add_flag("--gaussian-variance", dgp.gaussian_scale_is_variance,
                  "read N(0,5) as variance 5 instead of SD 5");
    sim->add_flag("--lognormal-sd", dgp.lognormal_scale_is_sd,
                  "read LN(2.1,4.5) as sigma instead of sigma^2");
    sim->add_flag("--discrete-two-point", dgp.discrete_two_point,
                  "read V{-2,2} as the two-point distribution");
    sim->add_flag("--scaled-exposure", dgp.scaled_exposure,
                  "strongly confounded exposure variant: W = 9*gamma(C) + 17 + noise");

    // design
    auto* design = app.add_subcommand("design", "GPS matching and balance diagnostics");
    DesignArgs da;
    add_io_options(design, da.io);
    design->add_option("--out-dir", da.out_dir, "output directory");
    design->add_option("--delta", da.fixed_delta, "fixed caliper (skips tuning)");
    design->add_option("--lambda", da.fixed_lambda, "fixed scale weight (skips tuning)");
    design->add_option("--delta-grid", da.delta_grid, "caliper grid")->delimiter(',');
    design->add_option("--lambda-grid", da.lambda_grid, "scale grid")->delimiter(',');
    design->add_option("--workers", da.workers, "parallel workers");
    design->add_flag("--iptw-balance", da.iptw_balance, "also report stabilized-IPTW balance");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "quantile curves on a matched dataset");
    AnalyzeArgs aa;
    analyze->add_option("--design-dir", aa.design_dir, "directory written by 'design'")->required();
    analyze->add_option("--out-dir", aa.out_dir, "output directory");
    analyze->add_option("--taus", aa.taus, "quantile levels")->delimiter(',');
    analyze->add_option("--grid-points", aa.grid_points, "evaluation grid size")
        ->check(CLI::Range(2, 100000));
    analyze->add_option("--h-mean", aa.h_mean, "mean-regression bandwidth (0 = LOO-CV)");
    analyze->add_option("--qee-increment", aa.qee_increment, "exposure increment for QEE curves");
    analyze->add_option("--variance-m", aa.variance_m, "neighbors M for the variance table");
    analyze->add_option("--bootstrap", aa.bootstrap_b, "bootstrap replicates for bands");
    analyze->add_option("--alpha", aa.alpha, "band level");
    auto* aseed = analyze->add_option("--seed", aa.seed, "bootstrap seed");
    auto* ainput = analyze->add_option("--input", aa.io.input, "original CSV (for bootstrap)");
    analyze->add_option("--exposure-col", aa.io.exposure_col, "exposure column name");
    analyze->add_option("--outcome-col", aa.io.outcome_col, "outcome column name");
    analyze->add_option("--covariate-cols", aa.io.covariate_cols, "covariate columns")
        ->delimiter(',');
    analyze->add_option("--weight-col", aa.io.weight_col, "weight column");
    analyze->add_option("--trim-lo", aa.io.trim_lo, "lower exposure trim fraction");
    analyze->add_option("--trim-hi", aa.io.trim_hi, "upper exposure trim fraction");
    analyze->add_option("--workers", aa.workers, "parallel workers");

    // bench
    auto* bench = app.add_subcommand("bench", "simulation benchmark (AB / RMSE tables)");
    BenchmarkConfig bc;
    bc.workers = default_workers();
    std::string bench_scenarios = "A";
    std::vector<Eigen::Index> bench_ns = {1000};
    std::vector<std::string> bench_estimators;
    std::string bench_out = ".";
    bench->add_option("--scenario", bench_scenarios, "A|B|C|D, comma list, or 'all'");
    bench->add_option("--n", bench_ns, "sample sizes")->delimiter(',');
    bench->add_option("--taus", bc.taus, "quantile levels")->delimiter(',');
    bench->add_option("--reps", bc.reps, "replications")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bc.seed, "RNG seed")->required();
    bench->add_option("--estimators", bench_estimators,
                      "subset of matching,matching-s,iptw")
        ->delimiter(',');
    bench->add_option("--truth-draws", bc.truth_draws, "Monte-Carlo draws for the truth oracle");
    bench->add_option("--grid-points", bc.grid_points, "evaluation grid size");
    bench->add_option("--workers", bc.workers, "parallel workers");
    bench->add_option("--out-dir", bench_out, "output directory");

    // bands
    auto* bands = app.add_subcommand("bands", "one-shot pipeline with bootstrap bands");
    IoOptions bio;
    add_io_options(bands, bio);
    std::string bands_out = ".";
    double bands_delta = 0.0, bands_lambda = -1.0, bands_alpha = 0.05, bands_hmean = 0.0;
    std::vector<double> bands_taus = {0.5};
    int bands_b = 50, bands_grid = 50, bands_workers = default_workers();
    std::uint64_t bands_seed = 0;
    bands->add_option("--out-dir", bands_out, "output directory");
    bands->add_option("--delta", bands_delta, "fixed caliper (0 = tune)");
    bands->add_option("--lambda", bands_lambda, "fixed scale weight");
    bands->add_option("--taus", bands_taus, "quantile levels")->delimiter(',');
    bands->add_option("--b", bands_b, "bootstrap replicates")->check(CLI::Range(2, 100000));
    bands->add_option("--alpha", bands_alpha, "band level");
    bands->add_option("--h-mean", bands_hmean, "bandwidth (0 = LOO-CV)");
    bands->add_option("--grid-points", bands_grid, "evaluation grid size");
    bands->add_option("--seed", bands_seed, "bootstrap seed")->required();
    bands->add_option("--workers", bands_workers, "parallel workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            if (sim_scenario.size() != 1) throw Error("scenario must be one of A, B, C, D");
            const ObservationalDataset ds =
                generate_scenario(scenario_by_id(sim_scenario[0]), sim_n, sim_seed, dgp);
            save_csv(ds, sim_out);
            std::cout << "simulate: wrote " << ds.n_units() << " rows to " << sim_out << '\n';
        } else if (design->parsed()) {
            return cmd_design(da);
        } else if (analyze->parsed()) {
            aa.have_seed = aseed->count() > 0;
            aa.have_input = ainput->count() > 0;
            return cmd_analyze(aa);
        } else if (bench->parsed()) {
            if (bench_scenarios == "all") {
                bc.scenarios = {'A', 'B', 'C', 'D'};
            } else {
                bc.scenarios.clear();
                for (const char ch : bench_scenarios)
                    if (ch != ',' && ch != ' ') bc.scenarios.push_back(ch);
            }
            bc.sample_sizes = bench_ns;
            if (!bench_estimators.empty()) {
                bc.estimators.clear();
                for (const auto& name : bench_estimators) {
                    if (name == "matching")
                        bc.estimators.push_back(Estimator::Matching);
                    else if (name == "matching-s")
                        bc.estimators.push_back(Estimator::MatchingSmooth);
                    else if (name == "iptw")
                        bc.estimators.push_back(Estimator::Iptw);
                    else
                        throw Error("unknown estimator '" + name + "'");
                }
            }
            return cmd_bench(bc, bench_out);
        } else if (bands->parsed()) {
            const ObservationalDataset ds = load_dataset(bio);
            const GpsModel gps = fit_linear_gps(ds);
            MatchConfig cfg{bands_delta, bands_lambda};
            if (!(bands_delta > 0.0 && bands_lambda >= 0.0))
                cfg = tune_hyperparameters(ds, gps, paper_delta_grid(), paper_lambda_grid(),
                                           bands_workers)
                          .config;
            const MatchedDataset matched = match_templates(ds, gps, cfg, bands_workers);
            const ExposureRange range = exposure_range(ds);
            double h_mean = bands_hmean;
            if (!(h_mean > 0.0))
                h_mean = select_bandwidth_mean(matched, default_h_grid(range.w_max - range.w_min));
            Eigen::VectorXd grid(bands_grid);
            for (int g = 0; g < bands_grid; ++g)
                grid[g] = range.w_min + (range.w_max - range.w_min) * g / (bands_grid - 1.0);
            fs::create_directories(bands_out);
            std::vector<QuantileCurve> curves;
            for (const double tau : bands_taus) {
                const BandwidthSpec h = adjust_bandwidth(h_mean, tau);
                QuantileCurve curve = qerf_smooth(matched, grid, tau, h);
                BootstrapPipeline pipe{cfg, grid, tau, h};
                const BootstrapBands bb =
                    bootstrap_bands(ds, pipe, bands_b, bands_alpha,
                                    mix_seed(bands_seed, static_cast<std::uint64_t>(tau * 1e6)),
                                    bands_workers);
                curve.lower = bb.lower;
                curve.upper = bb.upper;
                curves.push_back(std::move(curve));
            }
            save_curves_csv(curves, bands_out + "/bands.csv");
            write_curves_svg(curves, bands_out + "/bands.svg", "QERF");
            std::cout << "bands: wrote " << curves.size() << " curves to " << bands_out << '\n';
        }
    } catch (const ReplicateFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const MissingColumn& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const EmptyDataset& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const EmptyAfterTrim& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
