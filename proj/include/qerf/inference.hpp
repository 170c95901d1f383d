#ifndef QERF_INFERENCE_HPP
#define QERF_INFERENCE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "qerf/dataset.hpp"
#include "qerf/matching.hpp"
#include "qerf/quantile.hpp"

namespace qerf {

struct VarianceEstimate {
    double w;
    double tau;
    double sigma2;        // plug-in Sigma-hat
    double density_at_q;  // f-hat_w at the estimated quantile
    int m_neighbors;
    double n_delta;  // N * delta, the normalization of the asymptotic law

    double se() const;  // sqrt(sigma2 / (N * delta))
};

/// Matching estimator of the conditional variance: for units inside the
/// caliper window around w, (M/(M+1)) * (1(Y_j <= q) - mean of the M nearest
/// neighbors' indicators)^2; zero for units outside the window. Neighbors are
/// the closest in-window units under the lambda-weighted standardized
/// (GPS, exposure) metric used for matching.
Eigen::VectorXd conditional_variance_mnn(const MatchedDataset& matched, double q, double w, int M);

/// K-weighted kernel density of the in-window outcomes at y; note the 1/N
/// normalization, so the total mass is sum(K_j 1_j(w,delta)) / N.
double density_weighted_kde(const MatchedDataset& matched, double y, double w, double h1);

/// Silverman bandwidth on the K-weighted in-window outcomes.
double default_outcome_bandwidth(const MatchedDataset& matched, double w);

VarianceEstimate variance_qerf(const MatchedDataset& matched, double w, double tau, int M);

/// Variance of the QEE: the sum of the two QERF variances.
double qee_variance(const VarianceEstimate& var_w, const VarianceEstimate& var_wprime);

/// Full-pipeline configuration rerun inside each bootstrap replicate.
struct BootstrapPipeline {
    MatchConfig match;       // fixed (delta, lambda), as chosen in the design stage
    Eigen::VectorXd grid;    // evaluation grid
    double tau;
    BandwidthSpec bandwidth; // held fixed across replicates
    // Test hook: reuse the same weight stream in every replicate, collapsing
    // the bands onto a single curve.
    bool same_seed_every_replicate = false;
};

struct BootstrapBands {
    Eigen::VectorXd grid;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    double alpha;
    std::uint64_t seed;
    int replicates;  // successful replicates
    std::vector<Eigen::VectorXd> curves;
};

/// Weighted bootstrap: per replicate, i.i.d. Exp(1) unit weights multiply
/// unit_weight through GPS fit, matching and the smoothed quantile fit. Bands
/// are pointwise empirical (alpha/2, 1-alpha/2) quantiles of the replicate
/// curves. Deterministic given (seed, B) for any worker count.
BootstrapBands bootstrap_bands(const ObservationalDataset& ds, const BootstrapPipeline& pipeline,
                               int B, double alpha, std::uint64_t seed, int workers = 1);

void save_variance_csv(const std::vector<VarianceEstimate>& estimates,
                       const std::vector<double>& qerf_values, const std::string& path);

}  // namespace qerf

#endif  // QERF_INFERENCE_HPP
