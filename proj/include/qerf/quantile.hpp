#ifndef QERF_QUANTILE_HPP
#define QERF_QUANTILE_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

namespace qerf {

struct MatchedDataset;

enum class CurveKind { Empirical, Smoothed };

struct QuantileCurve {
    double tau = 0.5;
    Eigen::VectorXd grid;
    Eigen::VectorXd estimate;
    Eigen::VectorXd lower;  // empty when no bands
    Eigen::VectorXd upper;
    CurveKind kind = CurveKind::Smoothed;

    bool has_bands() const { return lower.size() == grid.size() && upper.size() == grid.size(); }
};

/// Bandwidth for the kernel quantile fit: the Yu-Jones adjustment of a mean
/// regression bandwidth, h_tau = h_mean * {tau(1-tau) / phi(Phi^-1(tau))^2}^(1/5).
struct BandwidthSpec {
    double h_mean;
    double h_tau;
    double tau;
};

/// Smallest minimizer of sum_j w_j rho_tau(y_j - q) over q, computed by
/// inverting the weighted CDF: the smallest value whose cumulative weight
/// reaches tau * sum(w). Zero weights are ignored.
double weighted_quantile(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double tau);

/// Weighted local-constant (Gaussian kernel) quantile fit: at each grid point
/// the quantile of y under weights w_j * phi((x_j - g)/h). Shared by the
/// matched-set and IPTW estimators.
Eigen::VectorXd kernel_quantile_curve(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& weights, const Eigen::VectorXd& grid,
                                      double tau, double h);

/// Empirical matched-set estimator: the K*unit_weight weighted quantile of the
/// outcomes whose exposure lies in [w - delta, w + delta].
double qerf_empirical(const MatchedDataset& matched, double w, double tau);

QuantileCurve qerf_empirical_curve(const MatchedDataset& matched, const Eigen::VectorXd& grid,
                                   double tau);

/// Leave-one-out cross-validation of the local-constant mean fit on the
/// matched rows; returns the grid minimizer, ties to the smaller h.
double select_bandwidth_mean(const MatchedDataset& matched, const std::vector<double>& h_grid);

/// LOO-CV over x/y/weights directly (also used by the IPTW comparator).
double select_bandwidth_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& weights, const std::vector<double>& h_grid);

/// 20 log-spaced candidates between range/100 and range.
std::vector<double> default_h_grid(double exposure_range, int size = 20);

BandwidthSpec adjust_bandwidth(double h_mean, double tau);

/// Smoothed matched-set estimator on a grid; Gaussian kernel over all matched
/// units, no caliper truncation.
QuantileCurve qerf_smooth(const MatchedDataset& matched, const Eigen::VectorXd& grid, double tau,
                          const BandwidthSpec& h);

double qerf_smooth_at(const MatchedDataset& matched, double w, double tau, const BandwidthSpec& h);

/// Quantile exposure effect from a fitted curve evaluated at two grid points.
double qee(const QuantileCurve& curve, Eigen::Index i, Eigen::Index j);

/// Smoothed QEE at two exposure levels with a shared bandwidth.
double qee_smooth(const MatchedDataset& matched, double w, double w_prime, double tau,
                  const BandwidthSpec& h);

void save_curve_csv(const QuantileCurve& curve, const std::string& path);
void save_curves_csv(const std::vector<QuantileCurve>& curves, const std::string& path);

}  // namespace qerf

#endif  // QERF_QUANTILE_HPP
