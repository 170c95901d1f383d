#include "qerf/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "qerf/errors.hpp"
#include "qerf/math.hpp"
#include "qerf/parallel.hpp"

namespace qerf {

ExposureBins make_bins(const ExposureRange& range, double delta) {
    if (!(delta > 0.0)) throw Error("make_bins: delta must be positive");
    if (!(range.w_min < range.w_max)) throw Error("make_bins: invalid exposure range");
    const auto L =
        static_cast<Eigen::Index>(std::floor((range.w_max - range.w_min) / (2.0 * delta) + 0.5));
    if (L < 1) throw CaliperTooLarge("caliper delta yields zero exposure bins");
    ExposureBins bins;
    bins.delta = delta;
    bins.levels.resize(L);
    for (Eigen::Index l = 0; l < L; ++l)
        bins.levels[l] = range.w_min + (2.0 * static_cast<double>(l) + 1.0) * delta;
    return bins;
}

Eigen::VectorXd standardize(const Eigen::VectorXd& values) {
    if (values.size() == 0) throw Error("standardize: empty input");
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    if (hi == lo) return Eigen::VectorXd::Constant(values.size(), 0.5);
    return (values.array() - lo) / (hi - lo);
}

namespace {

struct MinMax {
    double lo;
    double range;  // 0 means constant input

    double operator()(double x) const { return range == 0.0 ? 0.5 : (x - lo) / range; }
};

MinMax minmax_of(const Eigen::VectorXd& v) {
    const double lo = v.minCoeff();
    const double hi = v.maxCoeff();
    return {lo, hi - lo};
}

// Candidates of one level sorted by standardized GPS coordinate.
struct LevelCandidates {
    std::vector<double> e_star;   // sorted
    std::vector<double> bias;     // ((1-lambda) * (w*_j - w^(l)*))^2
    std::vector<int> unit;        // original unit index
};

/// Nearest candidate to template coordinate et under
/// d^2 = (lambda*(e_j - et))^2 + bias_j; ties to the lowest unit index.
/// Expands outward from the insertion point and prunes a side once its GPS
/// term alone exceeds the best distance.
int nearest_candidate(const LevelCandidates& cand, double et, double lambda) {
    const auto m = static_cast<std::ptrdiff_t>(cand.e_star.size());
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_unit = -1;
    auto consider = [&](std::ptrdiff_t i) {
        const double de = lambda * (cand.e_star[i] - et);
        const double d2 = de * de + cand.bias[i];
        if (d2 < best_d2 || (d2 == best_d2 && cand.unit[i] < best_unit)) {
            best_d2 = d2;
            best_unit = cand.unit[i];
        }
    };
    const auto it = std::lower_bound(cand.e_star.begin(), cand.e_star.end(), et);
    std::ptrdiff_t right = it - cand.e_star.begin();
    std::ptrdiff_t left = right - 1;
    while (left >= 0 || right < m) {
        bool left_alive = left >= 0;
        if (left_alive) {
            const double de = lambda * (cand.e_star[left] - et);
            left_alive = de * de <= best_d2;
        }
        bool right_alive = right < m;
        if (right_alive) {
            const double de = lambda * (cand.e_star[right] - et);
            right_alive = de * de <= best_d2;
        }
        if (!left_alive && !right_alive) break;
        if (left_alive) consider(left--);
        if (right_alive) consider(right++);
    }
    return best_unit;
}

}  // namespace

MatchedDataset match_templates(const ObservationalDataset& ds, const GpsModel& gps,
                               const MatchConfig& cfg, int workers) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw Error("lambda must lie in [0,1]");
    const ExposureBins bins = make_bins(exposure_range(ds), cfg.delta);
    const Eigen::Index L = bins.count();
    const Eigen::Index n = ds.n_units();

    MatchedDataset out;
    out.levels = bins;
    out.config = cfg;
    out.source = ds;
    out.gps = gps;
    out.gps_values = evaluate_gps_all(gps, ds);
    out.match_index = Eigen::MatrixXi::Constant(L, n, -1);
    out.k_count_by_level.resize(L);

    const MinMax w_mm = minmax_of(ds.exposure);
    const double lambda = cfg.lambda;
    const double one_minus = 1.0 - lambda;

    // Unit order within each exposure bin, computed once.
    std::vector<std::vector<int>> bin_members(L);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < L; ++l) {
            const double wl = bins.levels[l];
            if (ds.exposure[j] >= wl - cfg.delta && ds.exposure[j] <= wl + cfg.delta)
                bin_members[l].push_back(static_cast<int>(j));
        }
    }

    parallel_for(static_cast<std::size_t>(L), workers, [&](std::size_t li) {
        const auto l = static_cast<Eigen::Index>(li);
        const std::vector<int>& members = bin_members[l];
        if (members.empty()) return;
        const double wl = bins.levels[l];
        const double wl_star = w_mm(wl);

        // GPS standardization pools the observed GPS values with this level's
        // template GPS values.
        const Eigen::VectorXd gps_tmpl = evaluate_gps_at(gps, wl, ds);
        MinMax e_mm = minmax_of(out.gps_values);
        e_mm.lo = std::min(e_mm.lo, gps_tmpl.minCoeff());
        const double hi = std::max(out.gps_values.maxCoeff(), gps_tmpl.maxCoeff());
        e_mm.range = hi - e_mm.lo;

        LevelCandidates cand;
        cand.e_star.reserve(members.size());
        cand.bias.reserve(members.size());
        cand.unit.reserve(members.size());
        std::vector<int> order(members.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> estar(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) estar[i] = e_mm(out.gps_values[members[i]]);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return estar[a] < estar[b] || (estar[a] == estar[b] && members[a] < members[b]);
        });
        for (const int i : order) {
            const int j = members[i];
            const double dw = one_minus * (w_mm(ds.exposure[j]) - wl_star);
            cand.e_star.push_back(estar[i]);
            cand.bias.push_back(dw * dw);
            cand.unit.push_back(j);
        }

        std::vector<int> counts(static_cast<std::size_t>(n), 0);
        if (lambda == 0.0) {
            // Distance ignores the GPS coordinate: one argmin serves every
            // template at this level.
            int best = -1;
            double best_b = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < cand.unit.size(); ++i)
                if (cand.bias[i] < best_b || (cand.bias[i] == best_b && cand.unit[i] < best)) {
                    best_b = cand.bias[i];
                    best = cand.unit[i];
                }
            out.match_index.row(l).setConstant(best);
            counts[best] = static_cast<int>(n);
        } else {
            for (Eigen::Index t = 0; t < n; ++t) {
                const int j = nearest_candidate(cand, e_mm(gps_tmpl[t]), lambda);
                out.match_index(l, t) = j;
                ++counts[j];
            }
        }
        auto& sparse = out.k_count_by_level[l];
        for (Eigen::Index j = 0; j < n; ++j)
            if (counts[j] > 0) sparse.emplace_back(static_cast<int>(j), counts[j]);
    });

    out.k_count = Eigen::VectorXi::Zero(n);
    bool any = false;
    for (Eigen::Index l = 0; l < L; ++l)
        for (const auto& [j, k] : out.k_count_by_level[l]) {
            out.k_count[j] += k;
            any = true;
        }
    if (!any) throw NoCandidatesAnywhere("every exposure bin is empty");
    return out;
}

namespace {

struct CorrAccumulator {
    double sw = 0, sx = 0, sxx = 0;
    Eigen::VectorXd sy, syy, sxy;

    explicit CorrAccumulator(Eigen::Index q)
        : sy(Eigen::VectorXd::Zero(q)), syy(Eigen::VectorXd::Zero(q)), sxy(Eigen::VectorXd::Zero(q)) {}

    void add(double weight, double x, const Eigen::RowVectorXd& c) {
        sw += weight;
        sx += weight * x;
        sxx += weight * x * x;
        sy += weight * c.transpose();
        syy += weight * c.cwiseAbs2().transpose();
        sxy += weight * x * c.transpose();
    }

    BalanceReport finish() const {
        const double var_x = sxx - sx * sx / sw;
        if (!(var_x > 0.0)) throw DegenerateExposure("exposure column has zero variance");
        BalanceReport rep;
        const Eigen::Index q = sy.size();
        rep.per_covariate_abs_corr.resize(q);
        for (Eigen::Index k = 0; k < q; ++k) {
            const double var_y = syy[k] - sy[k] * sy[k] / sw;
            if (!(var_y > 0.0)) {
                rep.per_covariate_abs_corr[k] = 0.0;  // constant column convention
                continue;
            }
            const double cov = sxy[k] - sx * sy[k] / sw;
            rep.per_covariate_abs_corr[k] = std::abs(cov / std::sqrt(var_x * var_y));
        }
        rep.aac = rep.per_covariate_abs_corr.mean();
        std::vector<double> sorted(rep.per_covariate_abs_corr.data(),
                                   rep.per_covariate_abs_corr.data() + q);
        std::sort(sorted.begin(), sorted.end());
        rep.median_abs_corr = q % 2 == 1 ? sorted[q / 2]
                                         : 0.5 * (sorted[q / 2 - 1] + sorted[q / 2]);
        return rep;
    }
};

}  // namespace

BalanceReport balance_report(const MatchedDataset& matched) {
    CorrAccumulator acc(matched.source.n_covariates());
    for (Eigen::Index l = 0; l < matched.n_levels(); ++l) {
        const double wl = matched.levels.levels[l];
        for (const auto& [j, k] : matched.k_count_by_level[l])
            acc.add(static_cast<double>(k), wl, matched.source.covariates.row(j));
    }
    return acc.finish();
}

BalanceReport balance_report_raw(const ObservationalDataset& ds) {
    return balance_report_weighted(ds, ds.unit_weight);
}

BalanceReport balance_report_weighted(const ObservationalDataset& ds,
                                      const Eigen::VectorXd& weights) {
    if (weights.size() != ds.n_units()) throw DimensionMismatch("balance weights length mismatch");
    if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0))
        throw Error("balance weights must be nonnegative with positive sum");
    CorrAccumulator acc(ds.n_covariates());
    for (Eigen::Index j = 0; j < ds.n_units(); ++j)
        if (weights[j] > 0.0) acc.add(weights[j], ds.exposure[j], ds.covariates.row(j));
    return acc.finish();
}

std::vector<double> paper_delta_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(0.125 * i);
    return grid;
}

std::vector<double> paper_lambda_grid() { return {0.2, 0.4, 0.6, 0.8, 1.0}; }

TuneResult tune_hyperparameters(const ObservationalDataset& ds, const GpsModel& gps,
                                const std::vector<double>& delta_grid,
                                const std::vector<double>& lambda_grid, int workers) {
    if (delta_grid.empty() || lambda_grid.empty()) throw Error("tune: empty hyperparameter grid");
    const std::size_t nd = delta_grid.size();
    const std::size_t nl = lambda_grid.size();
    Eigen::MatrixXd aac(nd, nl);
    parallel_for(nd * nl, workers, [&](std::size_t cell) {
        const std::size_t di = cell / nl;
        const std::size_t li = cell % nl;
        double score = 1.0;  // errored cells score worst-possible AAC
        try {
            const MatchedDataset m =
                match_templates(ds, gps, {delta_grid[di], lambda_grid[li]}, 1);
            score = balance_report(m).aac;
        } catch (const Error&) {
        }
        aac(static_cast<Eigen::Index>(di), static_cast<Eigen::Index>(li)) = score;
    });

    // Minimize AAC; ties prefer coarser matching (larger delta, then lambda).
    std::size_t best_d = 0, best_l = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t di = 0; di < nd; ++di)
        for (std::size_t li = 0; li < nl; ++li) {
            const double v = aac(static_cast<Eigen::Index>(di), static_cast<Eigen::Index>(li));
            const bool better =
                v < best ||
                (v == best && (delta_grid[di] > delta_grid[best_d] ||
                               (delta_grid[di] == delta_grid[best_d] &&
                                lambda_grid[li] > lambda_grid[best_l])));
            if (better) {
                best = v;
                best_d = di;
                best_l = li;
            }
        }
    TuneResult result;
    result.config = {delta_grid[best_d], lambda_grid[best_l]};
    result.aac_grid = aac;
    result.report = balance_report(match_templates(ds, gps, result.config, workers));
    return result;
}

void save_matched_csv(const MatchedDataset& matched, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(17);
    out << "level_index,level_value,template_index,matched_unit_index,matched_y,matched_w,"
           "matched_weight,matched_gps\n";
    for (Eigen::Index l = 0; l < matched.n_levels(); ++l)
        for (Eigen::Index t = 0; t < matched.n_templates(); ++t) {
            const int j = matched.match_index(l, t);
            if (j < 0) continue;
            out << l << ',' << matched.levels.levels[l] << ',' << t << ',' << j << ','
                << matched.source.outcome[j] << ',' << matched.source.exposure[j] << ','
                << matched.source.unit_weight[j] << ',' << matched.gps_values[j] << '\n';
        }
}

void save_balance_csv(const BalanceReport& matched, const BalanceReport& raw,
                      const std::vector<std::string>& names, const std::string& path,
                      const BalanceReport* weighted) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(10);
    out << "covariate,matched_abs_corr,raw_abs_corr";
    if (weighted) out << ",weighted_abs_corr";
    out << '\n';
    for (Eigen::Index k = 0; k < matched.per_covariate_abs_corr.size(); ++k) {
        out << names[static_cast<std::size_t>(k)] << ',' << matched.per_covariate_abs_corr[k] << ','
            << raw.per_covariate_abs_corr[k];
        if (weighted) out << ',' << weighted->per_covariate_abs_corr[k];
        out << '\n';
    }
    out << "AAC," << matched.aac << ',' << raw.aac;
    if (weighted) out << ',' << weighted->aac;
    out << '\n';
}

}  // namespace qerf
