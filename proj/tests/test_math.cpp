#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "qerf/errors.hpp"
#include "qerf/math.hpp"
#include "qerf/parallel.hpp"

using namespace qerf;

TEST_CASE("normal_pdf and normal_cdf: tabulated values") {
    // [TRIVIAL] classic table entries
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(normal_pdf(1.0) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
}

TEST_CASE("normal_quantile inverts normal_cdf to high precision") {
    for (const double p : {1e-6, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 1.0 - 1e-6}) {
        const double z = normal_quantile(p);
        CHECK(normal_cdf(z) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    // [DERIVED] Phi^-1(0.975) from standard tables.
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
}

TEST_CASE("weighted mean / variance / correlation against direct formulas") {
    const Eigen::VectorXd x{{1.0, 2.0, 4.0}};
    const Eigen::VectorXd y{{2.0, 1.0, 5.0}};
    const Eigen::VectorXd w{{1.0, 2.0, 1.0}};
    // [DERIVED] mean = (1 + 4 + 4)/4 = 2.25
    CHECK(weighted_mean(x, w) == doctest::Approx(2.25).epsilon(1e-14));
    // var = (1*(1-2.25)^2 + 2*(2-2.25)^2 + 1*(4-2.25)^2)/4 = 1.1875
    CHECK(weighted_variance(x, w) == doctest::Approx(1.1875).epsilon(1e-14));
    // correlation with itself is 1; zero-variance input gives 0
    CHECK(weighted_correlation(x, x, w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(weighted_correlation(x, Eigen::VectorXd::Constant(3, 2.0), w) == 0.0);
}

TEST_CASE("silverman_bandwidth is positive and scale-equivariant") {
    Eigen::VectorXd x(200);
    for (int i = 0; i < 200; ++i) x[i] = std::sin(i * 12.9898) * 43758.5453;
    for (int i = 0; i < 200; ++i) x[i] -= std::floor(x[i]);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(200);
    const double h = silverman_bandwidth(x, w);
    CHECK(h > 0.0);
    CHECK(silverman_bandwidth(3.0 * x, w) == doctest::Approx(3.0 * h).epsilon(1e-10));
}

TEST_CASE("mix_seed decorrelates and is deterministic") {
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2) != mix_seed(2, 2));
    CHECK(mix_seed(0, 0) != 0);
}

TEST_CASE("parallel_for covers every index exactly once, any worker count") {
    for (const int workers : {1, 3, 8}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(1000, workers, [&](std::size_t i) { ++hits[i]; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("parallel_for propagates exceptions from workers") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 57) throw Error("boom");
                                 }),
                    Error);
}

TEST_CASE("default_workers honors QERF_WORKERS") {
    setenv("QERF_WORKERS", "3", 1);
    CHECK(default_workers() == 3);
    setenv("QERF_WORKERS", "0", 1);
    CHECK(default_workers() >= 1);  // invalid values fall back
    unsetenv("QERF_WORKERS");
    CHECK(default_workers() >= 1);
    CHECK(default_workers() <= 8);
}
