#include "qerf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "qerf/errors.hpp"
#include "qerf/gps.hpp"
#include "qerf/math.hpp"
#include "qerf/parallel.hpp"

namespace qerf {

double VarianceEstimate::se() const { return std::sqrt(sigma2 / n_delta); }

namespace {

std::vector<Eigen::Index> window_units(const MatchedDataset& matched, double w) {
    const double delta = matched.config.delta;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < matched.source.n_units(); ++j) {
        const double wj = matched.source.exposure[j];
        if (wj >= w - delta && wj <= w + delta) idx.push_back(j);
    }
    return idx;
}

}  // namespace

Eigen::VectorXd conditional_variance_mnn(const MatchedDataset& matched, double q, double w, int M) {
    if (M < 1) throw Error("conditional_variance_mnn: M must be >= 1");
    const std::vector<Eigen::Index> window = window_units(matched, w);
    if (static_cast<int>(window.size()) < M + 1)
        throw InsufficientNeighbors("caliper window holds fewer than M+1 units");

    const Eigen::VectorXd e_star = standardize(matched.gps_values);
    const Eigen::VectorXd w_star = standardize(matched.source.exposure);
    const double lambda = matched.config.lambda;
    const double one_minus = 1.0 - lambda;

    Eigen::VectorXd out = Eigen::VectorXd::Zero(matched.source.n_units());
    const double scale = static_cast<double>(M) / (M + 1.0);
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(window.size());
    for (const Eigen::Index j : window) {
        dist.clear();
        for (const Eigen::Index k : window) {
            if (k == j) continue;
            const double de = lambda * (e_star[k] - e_star[j]);
            const double dw = one_minus * (w_star[k] - w_star[j]);
            dist.emplace_back(de * de + dw * dw, k);
        }
        std::partial_sort(dist.begin(), dist.begin() + M, dist.end());
        double neighbor_mean = 0.0;
        for (int m = 0; m < M; ++m)
            neighbor_mean += matched.source.outcome[dist[m].second] <= q ? 1.0 : 0.0;
        neighbor_mean /= M;
        const double own = matched.source.outcome[j] <= q ? 1.0 : 0.0;
        const double dev = own - neighbor_mean;
        out[j] = scale * dev * dev;
    }
    return out;
}

double default_outcome_bandwidth(const MatchedDataset& matched, double w) {
    const std::vector<Eigen::Index> window = window_units(matched, w);
    std::vector<double> y, k;
    for (const Eigen::Index j : window)
        if (matched.k_count[j] > 0) {
            y.push_back(matched.source.outcome[j]);
            k.push_back(static_cast<double>(matched.k_count[j]));
        }
    if (y.size() < 2) throw EmptyWindow("not enough matched units in window for a bandwidth");
    const Eigen::Index m = static_cast<Eigen::Index>(y.size());
    const double h = silverman_bandwidth(Eigen::Map<Eigen::VectorXd>(y.data(), m),
                                         Eigen::Map<Eigen::VectorXd>(k.data(), m));
    if (!(h > 0.0)) throw DegenerateSample("in-window outcomes have no spread");
    return h;
}

double density_weighted_kde(const MatchedDataset& matched, double y, double w, double h1) {
    if (!(h1 > 0.0)) throw Error("density_weighted_kde: h1 must be positive");
    const std::vector<Eigen::Index> window = window_units(matched, w);
    if (window.empty()) throw EmptyWindow("empty caliper window");
    const double n = static_cast<double>(matched.source.n_units());
    double sum = 0.0;
    for (const Eigen::Index j : window) {
        if (matched.k_count[j] == 0) continue;
        const double z = (matched.source.outcome[j] - y) / h1;
        sum += matched.k_count[j] * normal_pdf(z) / h1;
    }
    return sum / n;
}

VarianceEstimate variance_qerf(const MatchedDataset& matched, double w, double tau, int M) {
    const double q = qerf_empirical(matched, w, tau);
    const double h1 = default_outcome_bandwidth(matched, w);
    const double density = density_weighted_kde(matched, q, w, h1);
    if (density <= 1e-8) throw DensityFloorHit("outcome density at the quantile is below 1e-8");

    const Eigen::VectorXd sigma2_units = conditional_variance_mnn(matched, q, w, M);
    const double n = static_cast<double>(matched.source.n_units());
    const double delta = matched.config.delta;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < matched.source.n_units(); ++j) {
        const double k = matched.k_count[j];
        sum += delta * k * k * sigma2_units[j];
    }
    VarianceEstimate est;
    est.w = w;
    est.tau = tau;
    est.density_at_q = density;
    est.sigma2 = sum / n / (density * density);
    est.m_neighbors = M;
    est.n_delta = n * delta;
    return est;
}

double qee_variance(const VarianceEstimate& var_w, const VarianceEstimate& var_wprime) {
    return var_w.sigma2 + var_wprime.sigma2;
}

BootstrapBands bootstrap_bands(const ObservationalDataset& ds, const BootstrapPipeline& pipeline,
                               int B, double alpha, std::uint64_t seed, int workers) {
    if (B < 2) throw Error("bootstrap_bands: B must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bootstrap_bands: alpha outside (0,1)");

    std::vector<Eigen::VectorXd> curves(static_cast<std::size_t>(B));
    std::vector<char> ok(static_cast<std::size_t>(B), 0);
    parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t b) {
        std::mt19937_64 rng(mix_seed(seed, pipeline.same_seed_every_replicate ? 0 : b));
        std::exponential_distribution<double> exp1(1.0);
        Eigen::VectorXd xi(ds.n_units());
        for (Eigen::Index j = 0; j < ds.n_units(); ++j) xi[j] = exp1(rng);
        try {
            const ObservationalDataset resampled = reweight(ds, xi);
            const GpsModel gps = fit_linear_gps(resampled);
            const MatchedDataset matched = match_templates(resampled, gps, pipeline.match, 1);
            const QuantileCurve curve =
                qerf_smooth(matched, pipeline.grid, pipeline.tau, pipeline.bandwidth);
            curves[b] = curve.estimate;
            ok[b] = 1;
        } catch (const Error&) {
            ok[b] = 0;  // replicate skipped, counted below
        }
    });

    std::vector<const Eigen::VectorXd*> kept;
    for (std::size_t b = 0; b < curves.size(); ++b)
        if (ok[b]) kept.push_back(&curves[b]);
    if (kept.size() * 5 < curves.size() * 4)
        throw ReplicateFailure("more than 20% of bootstrap replicates failed");

    BootstrapBands bands;
    bands.grid = pipeline.grid;
    bands.alpha = alpha;
    bands.seed = seed;
    bands.replicates = static_cast<int>(kept.size());
    bands.lower.resize(pipeline.grid.size());
    bands.upper.resize(pipeline.grid.size());
    Eigen::VectorXd column(static_cast<Eigen::Index>(kept.size()));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(column.size());
    for (Eigen::Index g = 0; g < pipeline.grid.size(); ++g) {
        for (std::size_t b = 0; b < kept.size(); ++b)
            column[static_cast<Eigen::Index>(b)] = (*kept[b])[g];
        bands.lower[g] = weighted_quantile(column, ones, alpha / 2.0);
        bands.upper[g] = weighted_quantile(column, ones, 1.0 - alpha / 2.0);
    }
    bands.curves.reserve(kept.size());
    for (const auto* c : kept) bands.curves.push_back(*c);
    return bands;
}

void save_variance_csv(const std::vector<VarianceEstimate>& estimates,
                       const std::vector<double>& qerf_values, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(10);
    out << "w,tau,estimate,se,density_at_q,M\n";
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& e = estimates[i];
        out << e.w << ',' << e.tau << ',' << qerf_values[i] << ',' << e.se() << ','
            << e.density_at_q << ',' << e.m_neighbors << '\n';
    }
}

}  // namespace qerf
