#include "qerf/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "qerf/errors.hpp"
#include "qerf/math.hpp"
#include "qerf/matching.hpp"

namespace qerf {

double weighted_quantile(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double tau) {
    if (values.size() != weights.size())
        throw DimensionMismatch("weighted_quantile: size mismatch");
    if (!(tau > 0.0 && tau < 1.0)) throw Error("weighted_quantile: tau outside (0,1)");
    const double total = weights.sum();
    if (!(total > 0.0)) throw ZeroTotalWeight("weighted_quantile: nonpositive total weight");

    std::vector<Eigen::Index> order(values.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });

    const double target = tau * total;
    double cum = 0.0;
    for (const Eigen::Index i : order) {
        cum += weights[i];
        if (cum >= target && weights[i] > 0.0) return values[i];
    }
    // Only reachable through rounding in the cumulative sum.
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (weights[*it] > 0.0) return values[*it];
    throw ZeroTotalWeight("weighted_quantile: all weights zero");
}

Eigen::VectorXd kernel_quantile_curve(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& weights, const Eigen::VectorXd& grid,
                                      double tau, double h) {
    if (!(h > 0.0)) throw Error("kernel_quantile_curve: bandwidth must be positive");
    const Eigen::Index n = x.size();
    // Sort by outcome once; per grid point we only need a cumulative sweep.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return y[a] < y[b]; });

    Eigen::VectorXd out(grid.size());
    Eigen::VectorXd kw(n);
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const Eigen::ArrayXd z = (x.array() - grid[g]) / h;
        kw = (weights.array() * (-0.5 * z.square()).exp()).matrix();
        const double total = kw.sum();
        if (!(total > 0.0)) throw ZeroTotalWeight("kernel weights vanished at grid point");
        const double target = tau * total;
        double cum = 0.0;
        double result = std::numeric_limits<double>::quiet_NaN();
        for (const Eigen::Index i : order) {
            cum += kw[i];
            if (cum >= target && kw[i] > 0.0) {
                result = y[i];
                break;
            }
        }
        if (std::isnan(result)) result = y[order.back()];
        out[g] = result;
    }
    return out;
}

namespace {

/// Matched units (K_j > 0) with analysis weights K_j * unit_weight.
struct MatchedRows {
    Eigen::VectorXd w;
    Eigen::VectorXd y;
    Eigen::VectorXd weight;
};

MatchedRows matched_rows(const MatchedDataset& matched) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < matched.k_count.size(); ++j)
        if (matched.k_count[j] > 0) idx.push_back(j);
    if (idx.empty()) throw ZeroTotalWeight("matched dataset has no matched units");
    MatchedRows rows;
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    rows.w.resize(m);
    rows.y.resize(m);
    rows.weight.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index j = idx[i];
        rows.w[i] = matched.source.exposure[j];
        rows.y[i] = matched.source.outcome[j];
        rows.weight[i] = matched.k_count[j] * matched.source.unit_weight[j];
    }
    return rows;
}

}  // namespace

double qerf_empirical(const MatchedDataset& matched, double w, double tau) {
    const double delta = matched.config.delta;
    std::vector<double> y, kw;
    for (Eigen::Index j = 0; j < matched.k_count.size(); ++j) {
        if (matched.k_count[j] == 0) continue;
        const double wj = matched.source.exposure[j];
        if (wj < w - delta || wj > w + delta) continue;
        y.push_back(matched.source.outcome[j]);
        kw.push_back(matched.k_count[j] * matched.source.unit_weight[j]);
    }
    if (y.empty()) throw EmptyWindow("no matched units in caliper window at w");
    const Eigen::Index m = static_cast<Eigen::Index>(y.size());
    return weighted_quantile(Eigen::Map<Eigen::VectorXd>(y.data(), m),
                             Eigen::Map<Eigen::VectorXd>(kw.data(), m), tau);
}

QuantileCurve qerf_empirical_curve(const MatchedDataset& matched, const Eigen::VectorXd& grid,
                                   double tau) {
    QuantileCurve curve;
    curve.tau = tau;
    curve.grid = grid;
    curve.kind = CurveKind::Empirical;
    curve.estimate.resize(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g)
        curve.estimate[g] = qerf_empirical(matched, grid[g], tau);
    return curve;
}

double select_bandwidth_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& weights, const std::vector<double>& h_grid) {
    if (h_grid.empty()) throw Error("select_bandwidth_mean: empty grid");
    const Eigen::Index n = x.size();
    if (n < 3) throw Error("select_bandwidth_mean: need at least 3 rows");

    double best_h = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    bool any = false;
    Eigen::VectorXd kw(n);
    for (const double h : h_grid) {
        if (!(h > 0.0)) continue;
        double score = 0.0;
        double score_weight = 0.0;
        bool degenerate = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::ArrayXd z = (x.array() - x[j]) / h;
            kw = (weights.array() * (-0.5 * z.square()).exp()).matrix();
            // Zero the held-out entry instead of subtracting it afterwards:
            // when weights span hundreds of orders of magnitude, sum - kw[j]
            // cancels to 0 whenever kw[j] dominates the sum.
            kw[j] = 0.0;
            const double s0 = kw.sum();
            if (!(s0 > 0.0)) {
                degenerate = true;
                break;
            }
            const double s1 = kw.dot(y);
            const double fit = s1 / s0;
            const double err = y[j] - fit;
            score += weights[j] * err * err;
            score_weight += weights[j];
        }
        if (degenerate) continue;
        score /= score_weight;
        any = true;
        if (score < best_score || (score == best_score && h < best_h)) {
            best_score = score;
            best_h = h;
        }
    }
    if (!any) throw AllCandidatesDegenerate("every bandwidth candidate left an empty fold");
    return best_h;
}

double select_bandwidth_mean(const MatchedDataset& matched, const std::vector<double>& h_grid) {
    const MatchedRows rows = matched_rows(matched);
    return select_bandwidth_mean(rows.w, rows.y, rows.weight, h_grid);
}

std::vector<double> default_h_grid(double exposure_range, int size) {
    std::vector<double> grid(size);
    const double lo = std::log(exposure_range / 100.0);
    const double hi = std::log(exposure_range);
    for (int i = 0; i < size; ++i)
        grid[i] = std::exp(lo + (hi - lo) * i / (size - 1.0));
    return grid;
}

BandwidthSpec adjust_bandwidth(double h_mean, double tau) {
    if (!(h_mean > 0.0) || !(tau > 0.0 && tau < 1.0))
        throw Error("adjust_bandwidth: invalid h_mean or tau");
    const double phi = normal_pdf(normal_quantile(tau));
    const double factor = std::pow(tau * (1.0 - tau) / (phi * phi), 0.2);
    return {h_mean, h_mean * factor, tau};
}

QuantileCurve qerf_smooth(const MatchedDataset& matched, const Eigen::VectorXd& grid, double tau,
                          const BandwidthSpec& h) {
    const MatchedRows rows = matched_rows(matched);
    QuantileCurve curve;
    curve.tau = tau;
    curve.grid = grid;
    curve.kind = CurveKind::Smoothed;
    curve.estimate = kernel_quantile_curve(rows.w, rows.y, rows.weight, grid, tau, h.h_tau);
    return curve;
}

double qerf_smooth_at(const MatchedDataset& matched, double w, double tau, const BandwidthSpec& h) {
    Eigen::VectorXd grid(1);
    grid[0] = w;
    return qerf_smooth(matched, grid, tau, h).estimate[0];
}

double qee(const QuantileCurve& curve, Eigen::Index i, Eigen::Index j) {
    return curve.estimate[i] - curve.estimate[j];
}

double qee_smooth(const MatchedDataset& matched, double w, double w_prime, double tau,
                  const BandwidthSpec& h) {
    Eigen::VectorXd grid(2);
    grid << w, w_prime;
    const QuantileCurve c = qerf_smooth(matched, grid, tau, h);
    return c.estimate[0] - c.estimate[1];
}

void save_curve_csv(const QuantileCurve& curve, const std::string& path) {
    save_curves_csv({curve}, path);
}

void save_curves_csv(const std::vector<QuantileCurve>& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(17);
    out << "tau,w,estimate,lower,upper\n";
    for (const auto& curve : curves) {
        const bool bands = curve.has_bands();
        for (Eigen::Index g = 0; g < curve.grid.size(); ++g) {
            out << curve.tau << ',' << curve.grid[g] << ',' << curve.estimate[g] << ',';
            if (bands)
                out << curve.lower[g] << ',' << curve.upper[g];
            else
                out << ',';
            out << '\n';
        }
    }
}

}  // namespace qerf
