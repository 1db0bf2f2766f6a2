#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <doctest.h>

#include "znsim/noise.h"
#include "znsim/rng.h"
#include "znsim/stats.h"

using namespace znsim;

TEST_SUITE("noise") {

TEST_CASE("model factories validate their parameter domains") {
    CHECK_NOTHROW(NoiseModel::symmetric_stable(1.999));
    CHECK_THROWS_AS(NoiseModel::symmetric_stable(2.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseModel::symmetric_stable(0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseModel::symmetric_stable(-1.0), std::invalid_argument);
    CHECK_NOTHROW(NoiseModel::fractional_brownian(0.01));
    CHECK_THROWS_AS(NoiseModel::fractional_brownian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseModel::fractional_brownian(1.0), std::invalid_argument);
}

TEST_CASE("self-similarity index per model") {
    CHECK(self_similarity_index(NoiseModel::brownian()) == 0.5);
    CHECK(self_similarity_index(NoiseModel::symmetric_stable(1.6)) ==
          doctest::Approx(0.625).epsilon(1e-15));
    CHECK(self_similarity_index(NoiseModel::fractional_brownian(0.8)) == 0.8);
}

TEST_CASE("brownian path starts at zero with variance-dt increments") {
    RngStream rng(20, 0);
    const double dt = 0.01;
    const std::size_t n = 20000;
    GridPath path = sample_brownian_path(dt, n, rng);
    REQUIRE(path.size() == n + 1);
    CHECK(path.values[0] == 0.0);
    CHECK(path.dt == dt);

    double sum2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double inc = path.values[k + 1] - path.values[k];
        sum2 += inc * inc;
    }
    double var = sum2 / static_cast<double>(n);
    CHECK(std::abs(var - dt) < 3.0 * dt * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("brownian terminal variance scales with the horizon") {
    RngStream rng(21, 0);
    const std::size_t ensemble = 4000;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < ensemble; ++i) {
        GridPath path = sample_brownian_path(0.04, 100, rng); // horizon 4
        double terminal = path.values.back();
        sum2 += terminal * terminal;
    }
    double var = sum2 / static_cast<double>(ensemble);
    CHECK(std::abs(var - 4.0) < 3.0 * 4.0 * std::sqrt(2.0 / ensemble));
}

TEST_CASE("samplers reject empty grids and bad steps") {
    RngStream rng(22, 0);
    CHECK_THROWS_AS(sample_brownian_path(0.01, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_brownian_path(0.0, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_path(1.5, -1.0, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_fbm_path(0.7, 0.01, 0, rng), std::invalid_argument);
}

TEST_CASE("cauchy increments have the right median and quartiles") {
    RngStream rng(23, 0);
    const std::size_t n = 20000;
    GridPath path = sample_stable_path(1.0, 1.0, n, rng);
    std::vector<double> incs(n);
    for (std::size_t k = 0; k < n; ++k) incs[k] = path.values[k + 1] - path.values[k];
    std::sort(incs.begin(), incs.end());
    double median = incs[n / 2];
    double q1 = incs[n / 4];
    double q3 = incs[3 * n / 4];
    // Standard Cauchy: median 0, quartiles at -1 and +1.
    CHECK(std::abs(median) < 0.05);
    CHECK(q1 == doctest::Approx(-1.0).epsilon(0.08));
    CHECK(q3 == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("stable characteristic function matches exp(-|lambda|^s)") {
    RngStream rng(24, 0);
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    auto rows = verify_stable_cf(1.3, lambdas, 200000, rng);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.expected == doctest::Approx(std::exp(-std::pow(row.lambda, 1.3)))
                                  .epsilon(1e-12));
        CHECK(row.within_3se);
    }
}

TEST_CASE("fbm with H=0.5 has uncorrelated increments") {
    RngStream rng(25, 0);
    const std::size_t n = 20000;
    GridPath path = sample_fbm_path(0.5, 1.0, n, rng);
    double mean = 0.0;
    std::vector<double> incs(n);
    for (std::size_t k = 0; k < n; ++k) {
        incs[k] = path.values[k + 1] - path.values[k];
        mean += incs[k];
    }
    mean /= static_cast<double>(n);
    double cov = 0.0, var = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        cov += (incs[k] - mean) * (incs[k + 1] - mean);
        var += (incs[k] - mean) * (incs[k] - mean);
    }
    double rho = cov / var;
    CHECK(std::abs(rho) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fbm covariance checks pass at rough and smooth Hurst indices") {
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{
        {1, 1}, {1, 2}, {2, 2}, {1, 4}, {3, 4}};
    for (double hurst : {0.3, 0.75}) {
        RngStream rng(26, hurst < 0.5 ? 0 : 1);
        auto rows = verify_fbm_covariance(hurst, 1.0, 4, pairs, 20000, rng);
        REQUIRE(rows.size() == pairs.size());
        for (const auto& row : rows) {
            double expected = 0.5 * (std::pow(row.s, 2 * hurst) +
                                     std::pow(row.t, 2 * hurst) -
                                     std::pow(std::abs(row.t - row.s), 2 * hurst));
            CHECK(row.expected == doctest::Approx(expected).epsilon(1e-12));
            CHECK(row.within_3se);
        }
    }
}

TEST_CASE("circulant embedding and cholesky sampling agree in law") {
    const double hurst = 0.3;
    const std::size_t steps = 64, paths = 2000;
    std::vector<double> fast(paths), slow(paths);
    RngStream rng_fast(27, 0), rng_slow(27, 1);
    for (std::size_t i = 0; i < paths; ++i) {
        fast[i] = sample_fbm_path(hurst, 1.0, steps, rng_fast).values.back();
        slow[i] = sample_fbm_path(hurst, 1.0, steps, rng_slow, true).values.back();
    }
    auto report = ks_two_sample(fast, slow, 0.01);
    CHECK(report.passed);
}

TEST_CASE("self-similarity verification accepts all three models") {
    NoiseModel models[] = {NoiseModel::brownian(), NoiseModel::symmetric_stable(1.5),
                           NoiseModel::fractional_brownian(0.7)};
    std::uint64_t stream = 0;
    for (const auto& model : models) {
        for (double a : {1.0, 4.0}) {
            RngStream rng(28, stream++);
            auto report = verify_self_similarity(model, a, 1.0, 2000, rng, 0.01);
            CHECK(report.passed);
        }
    }
}

TEST_CASE("self-similarity verification rejects bad scales and tiny samples") {
    RngStream rng(29, 0);
    CHECK_THROWS_AS(verify_self_similarity(NoiseModel::brownian(), 0.0, 1.0, 2000, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_self_similarity(NoiseModel::brownian(), 2.0, 1.0, 10, rng),
                    std::invalid_argument);
}

TEST_CASE("envelope violation count on deterministic paths") {
    GridPath path;
    path.dt = 1.0;
    path.values.assign(11, 0.0);
    CHECK(envelope_violations(path, 0.5, 1.0, 0.1) == 0);

    for (std::size_t k = 0; k < path.values.size(); ++k)
        path.values[k] = 2.0 + static_cast<double>(k);
    // The origin is outside the envelope's domain; every positive time counts.
    CHECK(envelope_violations(path, 0.5, 1.0, 0.1) == path.values.size() - 1);
}

} // TEST_SUITE
