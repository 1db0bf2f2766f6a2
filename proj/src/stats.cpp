#include "znsim/stats.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace znsim {

namespace {

// Asymptotic survival function of the Kolmogorov distribution:
// Q(z) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 z^2), truncated when terms fall
// below 1e-10.
double kolmogorov_survival(double z) {
    if (z <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * z * z);
        if (term < 1e-10) break;
        sum += sign * term;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b,
                         double significance) {
    if (a.size() < 25 || b.size() < 25)
        throw std::invalid_argument("ks_two_sample: need at least 25 samples per side");

    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }

    double n_eff = na * nb / (na + nb);
    double p = kolmogorov_survival(std::sqrt(n_eff) * d);

    return TestReport{d, p, p >= significance};
}

LineFit loglog_fit(std::span<const double> ts, std::span<const double> xs) {
    if (ts.size() != xs.size())
        throw std::invalid_argument("loglog_fit: size mismatch");
    if (ts.size() < 2)
        throw std::invalid_argument("loglog_fit: need at least two points");

    const std::size_t n = ts.size();
    double sum_t = 0.0, sum_x = 0.0;
    std::vector<double> lt(n), lx(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(ts[k] > 0.0))
            throw std::invalid_argument("loglog_fit: times must be positive");
        if (xs[k] == 0.0)
            throw std::invalid_argument("loglog_fit: values must be nonzero");
        lt[k] = std::log(ts[k]);
        lx[k] = std::log(std::abs(xs[k]));
        sum_t += lt[k];
        sum_x += lx[k];
    }
    double mean_t = sum_t / static_cast<double>(n);
    double mean_x = sum_x / static_cast<double>(n);

    double stt = 0.0, stx = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double dt_ = lt[k] - mean_t;
        double dx_ = lx[k] - mean_x;
        stt += dt_ * dt_;
        stx += dt_ * dx_;
        sxx += dx_ * dx_;
    }
    if (stt == 0.0)
        throw std::invalid_argument("loglog_fit: all times equal");

    double slope = stx / stt;
    double intercept = mean_x - slope * mean_t;
    // r^2 = 1 for an exact fit including the horizontal one (sxx = 0).
    double r_squared = sxx == 0.0 ? 1.0 : std::clamp(stx * stx / (stt * sxx), 0.0, 1.0);
    return LineFit{slope, intercept, r_squared};
}

std::vector<std::complex<double>> empirical_cf(std::span<const double> sample,
                                               std::span<const double> lambdas) {
    if (sample.empty())
        throw std::invalid_argument("empirical_cf: empty sample");

    std::vector<std::complex<double>> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        double re = 0.0, im = 0.0;
        for (double x : sample) {
            re += std::cos(lambda * x);
            im += std::sin(lambda * x);
        }
        double n = static_cast<double>(sample.size());
        out.emplace_back(re / n, im / n);
    }
    return out;
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0)
        throw std::invalid_argument("wilson_interval: zero trials");
    if (successes > trials)
        throw std::invalid_argument("wilson_interval: successes exceed trials");

    const double z = 1.959963984540054; // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return Interval{center - half, center + half};
}

} // namespace znsim
