#ifndef QERF_MATCHING_HPP
#define QERF_MATCHING_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "qerf/dataset.hpp"
#include "qerf/gps.hpp"

namespace qerf {

struct MatchConfig {
    double delta;   // caliper, exposure units
    double lambda;  // weight of the GPS coordinate, in [0,1]
};

/// Disjoint exposure bins of width 2*delta with centers w^(l).
struct ExposureBins {
    Eigen::VectorXd levels;
    double delta;

    Eigen::Index count() const { return levels.size(); }
};

ExposureBins make_bins(const ExposureRange& range, double delta);

/// Min-max transform to [0,1]; a constant vector maps to all 0.5.
Eigen::VectorXd standardize(const Eigen::VectorXd& values);

/// Matched dataset of L levels x N templates. match_index(l, j') is the
/// observed unit matched to template (level l, covariates of unit j'), or -1
/// when the level's caliper window holds no candidates.
struct MatchedDataset {
    ExposureBins levels;
    Eigen::MatrixXi match_index;  // L x N, -1 = unmatched
    Eigen::VectorXi k_count;      // K_j, length N
    // Per-level replacement counts K_j^(l), sparse: (unit, count) pairs.
    std::vector<std::vector<std::pair<int, int>>> k_count_by_level;
    MatchConfig config;
    ObservationalDataset source;
    Eigen::VectorXd gps_values;  // e(W_j, C_j) under the model used for matching
    GpsModel gps;

    Eigen::Index n_levels() const { return levels.count(); }
    Eigen::Index n_templates() const { return match_index.cols(); }
    Eigen::Index matched_template_count() const { return k_count.cast<Eigen::Index>().sum(); }
};

MatchedDataset match_templates(const ObservationalDataset& ds, const GpsModel& gps,
                               const MatchConfig& cfg, int workers = 1);

struct BalanceReport {
    Eigen::VectorXd per_covariate_abs_corr;
    double aac;
    double median_abs_corr;
};

/// Balance over the matched template rows: exposure is the level value w^(l),
/// covariates those of the matched unit (replication by K_j^(l)).
BalanceReport balance_report(const MatchedDataset& matched);
BalanceReport balance_report_raw(const ObservationalDataset& ds);
BalanceReport balance_report_weighted(const ObservationalDataset& ds, const Eigen::VectorXd& weights);

struct TuneResult {
    MatchConfig config;
    BalanceReport report;
    Eigen::MatrixXd aac_grid;  // delta_grid.size() x lambda_grid.size()
};

/// Exhaustive AAC minimization over the (delta, lambda) grid; ties go to the
/// larger delta, then the larger lambda. A cell that errors scores AAC = 1.
TuneResult tune_hyperparameters(const ObservationalDataset& ds, const GpsModel& gps,
                                const std::vector<double>& delta_grid,
                                const std::vector<double>& lambda_grid, int workers = 1);

/// The simulation-study grid: delta in {0.125, 0.25, ..., 2.5}, lambda in
/// {0.2, 0.4, ..., 1.0}.
std::vector<double> paper_delta_grid();
std::vector<double> paper_lambda_grid();

void save_matched_csv(const MatchedDataset& matched, const std::string& path);
void save_balance_csv(const BalanceReport& matched, const BalanceReport& raw,
                      const std::vector<std::string>& names, const std::string& path,
                      const BalanceReport* weighted = nullptr);

}  // namespace qerf

#endif  // QERF_MATCHING_HPP
