// Statistical tests and fits backing the verification commands.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace znsim {

struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    bool passed = true; // p_value >= the significance the test was run at
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
// Both samples must have at least 25 entries.
TestReport ks_two_sample(std::vector<double> a, std::vector<double> b,
                         double significance);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of log|x| against log t. Requires all ts > 0, all
// xs != 0, and at least two distinct ts.
LineFit loglog_fit(std::span<const double> ts, std::span<const double> xs);

// Empirical characteristic function (1/n) * sum exp(i*lambda*x_j) at each
// requested lambda.
std::vector<std::complex<double>> empirical_cf(std::span<const double> sample,
                                               std::span<const double> lambdas);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Wilson 95% confidence interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials);

} // namespace znsim
