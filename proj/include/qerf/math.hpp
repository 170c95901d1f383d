#ifndef QERF_MATH_HPP
#define QERF_MATH_HPP

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

namespace qerf {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) / sd;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; absolute error well below 1e-12 on (0,1)).
double normal_quantile(double p);

/// Weighted mean and variance (weights need not sum to 1).
double weighted_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w);
double weighted_variance(const Eigen::VectorXd& x, const Eigen::VectorXd& w);

/// Weighted Pearson correlation; a zero-variance column on either side maps
/// to 0 by convention.
double weighted_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w);

/// Silverman rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5) on a
/// weighted sample. Effective n is Kish's (sum w)^2 / sum w^2.
double silverman_bandwidth(const Eigen::VectorXd& sample, const Eigen::VectorXd& weights);

/// splitmix64 step, used to derive independent seed streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace qerf

#endif  // QERF_MATH_HPP
