#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <random>

#include "qerf/errors.hpp"
#include "qerf/gps.hpp"
#include "qerf/math.hpp"

using namespace qerf;

namespace {

ObservationalDataset synthetic(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    ObservationalDataset ds;
    ds.covariates.resize(n, 2);
    ds.exposure.resize(n);
    ds.outcome.resize(n);
    ds.unit_weight = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ds.covariates(i, 0) = nd(rng);
        ds.covariates(i, 1) = nd(rng);
        ds.exposure[i] = 1.5 + 2.0 * ds.covariates(i, 0) - 0.5 * ds.covariates(i, 1) + 0.3 * nd(rng);
        ds.outcome[i] = nd(rng);
    }
    ds.covariate_names = {"c1", "c2"};
    return ds;
}

}  // namespace

TEST_CASE("fit_linear_gps recovers coefficients on an exact linear relation") {
    // [DERIVED] With zero noise the OLS fit is exact up to solver round-off.
    auto ds = synthetic(200, 7);
    ds.exposure = (1.5 + 2.0 * ds.covariates.col(0).array() - 0.5 * ds.covariates.col(1).array())
                      .matrix();
    // A tiny jitter keeps the residual away from the degeneracy guard.
    ds.exposure[0] += 1e-3;
    const GpsModel m = fit_linear_gps(ds);
    CHECK(m.intercept == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(m.coefficients[0] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(m.coefficients[1] == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("fit_linear_gps matches the normal equations on noisy data") {
    // [DERIVED] Independent oracle: solve X'WX b = X'W w directly.
    const auto ds = synthetic(500, 11);
    Eigen::MatrixXd X(ds.n_units(), 3);
    X.col(0).setOnes();
    X.col(1) = ds.covariates.col(0);
    X.col(2) = ds.covariates.col(1);
    const Eigen::VectorXd b =
        (X.transpose() * X).ldlt().solve(X.transpose() * ds.exposure);
    const Eigen::VectorXd resid = ds.exposure - X * b;
    const double ml_sd = std::sqrt(resid.squaredNorm() / static_cast<double>(ds.n_units()));

    const GpsModel m = fit_linear_gps(ds);
    CHECK(m.intercept == doctest::Approx(b[0]).epsilon(1e-10));
    CHECK(m.coefficients[0] == doctest::Approx(b[1]).epsilon(1e-10));
    CHECK(m.coefficients[1] == doctest::Approx(b[2]).epsilon(1e-10));
    CHECK(m.residual_sd == doctest::Approx(ml_sd).epsilon(1e-10));
}

TEST_CASE("fit_linear_gps honors unit weights") {
    // Duplicating a unit equals doubling its weight.
    auto ds = synthetic(60, 3);
    ObservationalDataset dup = ds;
    const Eigen::Index n = ds.n_units();
    dup.exposure.conservativeResize(n + 1);
    dup.outcome.conservativeResize(n + 1);
    dup.unit_weight.conservativeResize(n + 1);
    dup.covariates.conservativeResize(n + 1, Eigen::NoChange);
    dup.exposure[n] = ds.exposure[0];
    dup.outcome[n] = ds.outcome[0];
    dup.unit_weight[n] = 1.0;
    dup.covariates.row(n) = ds.covariates.row(0);

    auto weighted = ds;
    weighted.unit_weight[0] = 2.0;

    const GpsModel a = fit_linear_gps(dup);
    const GpsModel b = fit_linear_gps(weighted);
    CHECK(a.intercept == doctest::Approx(b.intercept).epsilon(1e-12));
    CHECK(a.coefficients.isApprox(b.coefficients, 1e-12));
    // ML residual SD uses the total weight, so it also agrees.
    CHECK(a.residual_sd == doctest::Approx(b.residual_sd).epsilon(1e-12));
}

TEST_CASE("fit_linear_gps throws RankDeficientDesign on duplicated columns") {
    auto ds = synthetic(50, 5);
    ds.covariates.col(1) = ds.covariates.col(0);
    CHECK_THROWS_AS(fit_linear_gps(ds), RankDeficientDesign);
}

TEST_CASE("fit_linear_gps throws DegenerateResidual on a perfect noiseless fit") {
    auto ds = synthetic(50, 9);
    ds.exposure = (0.5 + ds.covariates.col(0).array()).matrix();
    CHECK_THROWS_AS(fit_linear_gps(ds), DegenerateResidual);
}

TEST_CASE("evaluate_gps is the normal density at the conditional mean") {
    // [DERIVED] e(w, c) = phi((w - mu)/sd)/sd with mu = b0 + c'b.
    GpsModel m;
    m.intercept = 1.0;
    m.coefficients = Eigen::VectorXd{{2.0, -1.0}};
    m.residual_sd = 0.5;
    const Eigen::VectorXd c{{0.3, 0.4}};
    const double mu = 1.0 + 2.0 * 0.3 - 1.0 * 0.4;  // 1.2
    const double w = 1.5;
    const double z = (w - mu) / 0.5;
    const double expected = std::exp(-0.5 * z * z) / (0.5 * std::sqrt(2.0 * M_PI));
    CHECK(evaluate_gps(m, w, c) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("evaluate_gps_all and evaluate_gps_at agree with scalar evaluation") {
    const auto ds = synthetic(40, 13);
    const GpsModel m = fit_linear_gps(ds);
    const Eigen::VectorXd all = evaluate_gps_all(m, ds);
    const Eigen::VectorXd at = evaluate_gps_at(m, 0.7, ds);
    for (Eigen::Index i = 0; i < ds.n_units(); ++i) {
        CHECK(all[i] == doctest::Approx(evaluate_gps(m, ds.exposure[i], ds.covariates.row(i)))
                            .epsilon(1e-13));
        CHECK(at[i] ==
              doctest::Approx(evaluate_gps(m, 0.7, ds.covariates.row(i))).epsilon(1e-13));
    }
}

TEST_CASE("save_gps / load_gps round-trips") {
    GpsModel m;
    m.intercept = -0.25;
    m.coefficients = Eigen::VectorXd{{1.0, 2.5, -3.75}};
    m.residual_sd = 0.125;
    const std::string path = "/tmp/qerf_test_gps.txt";
    save_gps(m, path);
    const GpsModel back = load_gps(path);
    CHECK(back.intercept == m.intercept);
    CHECK(back.coefficients.isApprox(m.coefficients, 0.0));
    CHECK(back.residual_sd == m.residual_sd);
    std::remove(path.c_str());
}

TEST_CASE("marginal density integrates features of a weighted KDE") {
    const auto ds = synthetic(300, 17);
    const MarginalDensity md = fit_marginal_density(ds);
    CHECK(md.bandwidth > 0.0);
    // [DERIVED] Oracle: direct weighted KDE sum at a probe point.
    const double w = ds.exposure.mean();
    double acc = 0.0, wsum = 0.0;
    for (Eigen::Index i = 0; i < ds.n_units(); ++i) {
        const double z = (w - ds.exposure[i]) / md.bandwidth;
        acc += ds.unit_weight[i] * std::exp(-0.5 * z * z) /
               (md.bandwidth * std::sqrt(2.0 * M_PI));
        wsum += ds.unit_weight[i];
    }
    CHECK(evaluate_marginal(md, w) == doctest::Approx(acc / wsum).epsilon(1e-12));
}

TEST_CASE("fit_marginal_density throws DegenerateSample on constant exposure") {
    auto ds = synthetic(20, 19);
    ds.exposure.setConstant(2.0);
    CHECK_THROWS_AS(fit_marginal_density(ds), DegenerateSample);
}
