#include "qerf/math.hpp"

#include <algorithm>
#include <stdexcept>

#include "qerf/quantile.hpp"

namespace qerf {

namespace {

// Acklam coefficients for the inverse normal CDF.
constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                        6.680131188771972e+01, -1.328068155288572e+01};
constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                        3.754408661907416e+00};

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step against the forward CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double weighted_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    const double sw = w.sum();
    return x.dot(w) / sw;
}

double weighted_variance(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    const double m = weighted_mean(x, w);
    return (x.array() - m).square().matrix().dot(w) / w.sum();
}

double weighted_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w) {
    const double mx = weighted_mean(x, w);
    const double my = weighted_mean(y, w);
    const Eigen::ArrayXd dx = x.array() - mx;
    const Eigen::ArrayXd dy = y.array() - my;
    const double sxx = (dx.square() * w.array()).sum();
    const double syy = (dy.square() * w.array()).sum();
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    const double sxy = (dx * dy * w.array()).sum();
    return sxy / std::sqrt(sxx * syy);
}

double silverman_bandwidth(const Eigen::VectorXd& sample, const Eigen::VectorXd& weights) {
    const double sd = std::sqrt(weighted_variance(sample, weights));
    const double q1 = weighted_quantile(sample, weights, 0.25);
    const double q3 = weighted_quantile(sample, weights, 0.75);
    const double iqr = q3 - q1;
    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    const double sw = weights.sum();
    const double n_eff = sw * sw / weights.squaredNorm();
    return 0.9 * spread * std::pow(n_eff, -0.2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace qerf
