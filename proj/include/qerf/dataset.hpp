#ifndef QERF_DATASET_HPP
#define QERF_DATASET_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace qerf {

/// Units of an observational study with a continuous exposure. Immutable
/// after construction; categorical covariates must be pre-encoded as numeric
/// columns by the caller.
struct ObservationalDataset {
    Eigen::VectorXd exposure;
    Eigen::MatrixXd covariates;  // n_units x q
    Eigen::VectorXd outcome;
    Eigen::VectorXd unit_weight;  // positive, defaults to 1
    std::vector<std::string> covariate_names;

    Eigen::Index n_units() const { return exposure.size(); }
    Eigen::Index n_covariates() const { return covariates.cols(); }

    /// Throws on inconsistent sizes, non-finite entries or non-positive
    /// weights.
    void validate() const;
};

struct ExposureRange {
    double w_min;
    double w_max;
};

ExposureRange exposure_range(const ObservationalDataset& ds);

/// Mapping from CSV header names to dataset roles. weight is optional.
struct ColumnMap {
    std::string exposure;
    std::string outcome;
    std::vector<std::string> covariates;
    std::string weight;  // empty = all weights 1
};

ObservationalDataset load_csv(const std::string& path, const ColumnMap& schema);

/// Writes the dataset back out with columns w, y, c1..cq (or the stored
/// covariate names) and weight when non-uniform.
void save_csv(const ObservationalDataset& ds, const std::string& path);

/// Keeps units whose exposure falls in [lo_pct, hi_pct] empirical weighted
/// quantiles of the exposure.
ObservationalDataset trim_exposure(const ObservationalDataset& ds, double lo_pct, double hi_pct);

/// Returns a copy with unit_weight multiplied elementwise by factor.
ObservationalDataset reweight(const ObservationalDataset& ds, const Eigen::VectorXd& factor);

}  // namespace qerf

#endif  // QERF_DATASET_HPP
