#include "qerf/gps.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include "qerf/errors.hpp"
#include "qerf/math.hpp"

namespace qerf {

GpsModel fit_linear_gps(const ObservationalDataset& ds) {
    const Eigen::Index n = ds.n_units();
    const Eigen::Index q = ds.n_covariates();
    if (n <= q + 1) throw RankDeficientDesign("need n_units > q + 1");

    Eigen::MatrixXd design(n, q + 1);
    design.col(0).setOnes();
    design.rightCols(q) = ds.covariates;
    const Eigen::VectorXd sw = ds.unit_weight.cwiseSqrt();
    const Eigen::MatrixXd xw = sw.asDiagonal() * design;
    const Eigen::VectorXd yw = sw.cwiseProduct(ds.exposure);

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
    if (qr.rank() < q + 1) throw RankDeficientDesign("design matrix is rank deficient");
    const Eigen::VectorXd beta = qr.solve(yw);

    const Eigen::VectorXd resid = ds.exposure - design * beta;
    const double wrss = resid.cwiseAbs2().dot(ds.unit_weight);
    const double sd = std::sqrt(wrss / ds.unit_weight.sum());
    // sigma = 0 violates Overlap: every off-mean GPS evaluation would be 0.
    const double scale = std::max(ds.exposure.cwiseAbs().maxCoeff(), 1.0);
    if (sd <= 1e-12 * scale) throw DegenerateResidual("residual standard deviation is zero");

    GpsModel m;
    m.intercept = beta[0];
    m.coefficients = beta.tail(q);
    m.residual_sd = sd;
    return m;
}

double evaluate_gps(const GpsModel& m, double w, const Eigen::VectorXd& c) {
    if (c.size() != m.coefficients.size())
        throw DimensionMismatch("evaluate_gps: covariate length mismatch");
    return normal_pdf(w, m.intercept + m.coefficients.dot(c), m.residual_sd);
}

Eigen::VectorXd evaluate_gps_all(const GpsModel& m, const ObservationalDataset& ds) {
    if (ds.n_covariates() != m.coefficients.size())
        throw DimensionMismatch("evaluate_gps_all: covariate count mismatch");
    const Eigen::ArrayXd mean =
        (ds.covariates * m.coefficients).array() + m.intercept;
    const Eigen::ArrayXd z = (ds.exposure.array() - mean) / m.residual_sd;
    return (kInvSqrt2Pi / m.residual_sd * (-0.5 * z.square()).exp()).matrix();
}

Eigen::VectorXd evaluate_gps_at(const GpsModel& m, double w, const ObservationalDataset& ds) {
    if (ds.n_covariates() != m.coefficients.size())
        throw DimensionMismatch("evaluate_gps_at: covariate count mismatch");
    const Eigen::ArrayXd mean =
        (ds.covariates * m.coefficients).array() + m.intercept;
    const Eigen::ArrayXd z = (w - mean) / m.residual_sd;
    return (kInvSqrt2Pi / m.residual_sd * (-0.5 * z.square()).exp()).matrix();
}

void save_gps(const GpsModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(17);
    out << "intercept = " << m.intercept << '\n';
    out << "residual_sd = " << m.residual_sd << '\n';
    out << "coefficients =";
    for (Eigen::Index k = 0; k < m.coefficients.size(); ++k) out << ' ' << m.coefficients[k];
    out << '\n';
}

GpsModel load_gps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    GpsModel m;
    std::string key, eq;
    std::vector<double> coefs;
    bool have_intercept = false, have_sd = false;
    while (in >> key) {
        if (!(in >> eq) || eq != "=") throw Error("malformed GPS file '" + path + "'");
        if (key == "intercept") {
            in >> m.intercept;
            have_intercept = true;
        } else if (key == "residual_sd") {
            in >> m.residual_sd;
            have_sd = true;
        } else if (key == "coefficients") {
            double v;
            while (in >> v) coefs.push_back(v);
        } else {
            throw Error("unknown key '" + key + "' in GPS file");
        }
    }
    if (!have_intercept || !have_sd) throw Error("incomplete GPS file '" + path + "'");
    m.coefficients = Eigen::Map<Eigen::VectorXd>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
    if (m.residual_sd <= 0.0) throw DegenerateResidual("GPS file has residual_sd <= 0");
    return m;
}

MarginalDensity fit_marginal_density(const ObservationalDataset& ds) {
    if (ds.n_units() < 2) throw DegenerateSample("marginal density needs >= 2 units");
    MarginalDensity md;
    md.sample = ds.exposure;
    md.weights = ds.unit_weight;
    md.bandwidth = silverman_bandwidth(md.sample, md.weights);
    if (!(md.bandwidth > 0.0)) throw DegenerateSample("exposure sample has no spread");
    return md;
}

double evaluate_marginal(const MarginalDensity& md, double w) {
    const Eigen::ArrayXd z = (md.sample.array() - w) / md.bandwidth;
    const double mass =
        ((-0.5 * z.square()).exp() * md.weights.array()).sum() * kInvSqrt2Pi / md.bandwidth;
    return mass / md.weights.sum();
}

}  // namespace qerf
