#ifndef QERF_GPS_HPP
#define QERF_GPS_HPP

#include <Eigen/Core>
#include <string>

#include "qerf/dataset.hpp"

namespace qerf {

/// Linear-Gaussian generalized propensity score: W | C ~ N(intercept + C'b,
/// residual_sd^2). residual_sd is the ML estimate (total-weight denominator).
struct GpsModel {
    double intercept;
    Eigen::VectorXd coefficients;
    double residual_sd;
};

GpsModel fit_linear_gps(const ObservationalDataset& ds);

/// Normal density of w at the model's conditional mean given covariates c.
double evaluate_gps(const GpsModel& m, double w, const Eigen::VectorXd& c);

/// e(W_j, C_j) for every unit.
Eigen::VectorXd evaluate_gps_all(const GpsModel& m, const ObservationalDataset& ds);

/// e(w, C_j) at a fixed exposure for every unit (template GPS values).
Eigen::VectorXd evaluate_gps_at(const GpsModel& m, double w, const ObservationalDataset& ds);

void save_gps(const GpsModel& m, const std::string& path);
GpsModel load_gps(const std::string& path);

/// Weighted Gaussian KDE of the exposure with Silverman bandwidth; used to
/// stabilize IPTW weights.
struct MarginalDensity {
    Eigen::VectorXd sample;
    Eigen::VectorXd weights;
    double bandwidth;
};

MarginalDensity fit_marginal_density(const ObservationalDataset& ds);
double evaluate_marginal(const MarginalDensity& md, double w);

}  // namespace qerf

#endif  // QERF_GPS_HPP
