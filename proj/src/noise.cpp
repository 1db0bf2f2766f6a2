#include "znsim/noise.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

#include "znsim/errors.h"

namespace znsim {

namespace {

void require_grid_args(double dt, std::size_t n_steps) {
    if (!(dt > 0.0))
        throw std::invalid_argument("noise sampler: dt must be positive");
    if (n_steps == 0)
        throw std::invalid_argument("noise sampler: n_steps must be at least 1");
}

// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocov(double hurst, std::size_t k) {
    if (k == 0) return 1.0;
    double kd = static_cast<double>(k);
    double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) +
                  std::pow(kd - 1.0, h2));
}

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* data = nullptr;
    explicit FftwBuffer(std::size_t n) {
        data = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Forward DFT in place-from in to out, both length m.
void run_fft(fftw_complex* in, fftw_complex* out, std::size_t m) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(m), in, out, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("fbm sampler: FFT planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
}

// Eigenvalues of the circulant embedding of the fGn covariance for n
// increments (circulant size 2n). Empty result means the embedding is not
// nonnegative-definite and the caller must fall back to Cholesky.
std::vector<double> embedding_eigenvalues(double hurst, std::size_t n) {
    const std::size_t m = 2 * n;
    FftwBuffer in(m), out(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t lag = j <= n ? j : m - j;
        in.data[j][0] = fgn_autocov(hurst, lag);
        in.data[j][1] = 0.0;
    }
    run_fft(in.data, out.data, m);

    std::vector<double> lambda(m);
    double max_l = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        lambda[j] = out.data[j][0];
        max_l = std::max(max_l, lambda[j]);
    }
    const double tol = -1e-9 * std::max(max_l, 1.0);
    for (double& l : lambda) {
        if (l < tol) return {};
        l = std::max(l, 0.0);
    }
    return lambda;
}

// Cache: eigenvalue vectors are reused across the ensemble sims that hammer
// one (H, n) combination.
const std::vector<double>& cached_eigenvalues(double hurst, std::size_t n) {
    static std::mutex mutex;
    static std::map<std::pair<double, std::size_t>, std::unique_ptr<std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& entry = cache[{hurst, n}];
    if (!entry)
        entry = std::make_unique<std::vector<double>>(embedding_eigenvalues(hurst, n));
    return *entry;
}

// Unit-step fGn of length n via circulant embedding. Returns false when the
// embedding is unusable.
bool sample_fgn_circulant(double hurst, std::size_t n, RngStream& rng,
                          std::vector<double>& out) {
    const auto& lambda = cached_eigenvalues(hurst, n);
    if (lambda.empty()) return false;

    const std::size_t m = 2 * n;
    const double md = static_cast<double>(m);
    FftwBuffer freq(m), time(m);

    freq.data[0][0] = std::sqrt(lambda[0] / md) * rng.normal();
    freq.data[0][1] = 0.0;
    freq.data[n][0] = std::sqrt(lambda[n] / md) * rng.normal();
    freq.data[n][1] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        double scale = std::sqrt(lambda[k] / (2.0 * md));
        double re = scale * rng.normal();
        double im = scale * rng.normal();
        freq.data[k][0] = re;
        freq.data[k][1] = im;
        freq.data[m - k][0] = re;
        freq.data[m - k][1] = -im;
    }

    run_fft(freq.data, time.data, m);

    out.resize(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = time.data[j][0];
    return true;
}

// Unit-step fGn via dense Cholesky of the n x n covariance. O(n^3); the
// fallback route and the cross-check target for tests.
void sample_fgn_cholesky(double hurst, std::size_t n, RngStream& rng,
                         std::vector<double>& out) {
    std::vector<double> cov(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k <= j; ++k)
            cov[j * n + k] = fgn_autocov(hurst, j - k);

    // In-place lower Cholesky.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double sum = cov[j * n + k];
            for (std::size_t i = 0; i < k; ++i)
                sum -= cov[j * n + i] * cov[k * n + i];
            cov[j * n + k] = sum / cov[k * n + k];
        }
        double diag = cov[j * n + j];
        for (std::size_t i = 0; i < j; ++i)
            diag -= cov[j * n + i] * cov[j * n + i];
        if (!(diag > 0.0))
            throw NumericalError("fbm sampler: increment covariance is not positive definite");
        cov[j * n + j] = std::sqrt(diag);
    }

    std::vector<double> z(n);
    for (double& v : z) v = rng.normal();

    out.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i <= j; ++i) sum += cov[j * n + i] * z[i];
        out[j] = sum;
    }
}

} // namespace

NoiseModel NoiseModel::brownian() {
    return NoiseModel{Kind::Brownian, 0.0, 0.0};
}

NoiseModel NoiseModel::symmetric_stable(double s) {
    if (!(s > 0.0) || !(s < 2.0))
        throw std::invalid_argument("stability index must lie in (0,2)");
    return NoiseModel{Kind::SymmetricStable, s, 0.0};
}

NoiseModel NoiseModel::fractional_brownian(double hurst) {
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::invalid_argument("Hurst index must lie in (0,1)");
    return NoiseModel{Kind::FractionalBrownian, 0.0, hurst};
}

double self_similarity_index(const NoiseModel& model) {
    switch (model.kind) {
        case NoiseModel::Kind::Brownian:
            return 0.5;
        case NoiseModel::Kind::SymmetricStable:
            if (!(model.stability_index > 0.0) || !(model.stability_index < 2.0))
                throw std::invalid_argument("stability index must lie in (0,2)");
            return 1.0 / model.stability_index;
        case NoiseModel::Kind::FractionalBrownian:
            if (!(model.hurst > 0.0) || !(model.hurst < 1.0))
                throw std::invalid_argument("Hurst index must lie in (0,1)");
            return model.hurst;
    }
    throw std::invalid_argument("unknown noise kind");
}

GridPath sample_brownian_path(double dt, std::size_t n_steps, RngStream& rng) {
    require_grid_args(dt, n_steps);
    GridPath path;
    path.dt = dt;
    path.values.resize(n_steps + 1);
    path.values[0] = 0.0;
    const double sdt = std::sqrt(dt);
    for (std::size_t k = 0; k < n_steps; ++k)
        path.values[k + 1] = path.values[k] + sdt * rng.normal();
    return path;
}

double sample_standard_stable(double s, RngStream& rng) {
    if (!(s > 0.0) || !(s < 2.0))
        throw std::invalid_argument("stability index must lie in (0,2)");

    const double u = std::numbers::pi * (rng.uniform() - 0.5);
    if (s == 1.0) return std::tan(u); // Cauchy

    const double w = rng.exponential();
    // Chambers-Mallows-Stuck for the symmetric case: characteristic function
    // exp(-|lambda|^s).
    const double su = s * u;
    return (std::sin(su) / std::pow(std::cos(u), 1.0 / s)) *
           std::pow(std::cos(u - su) / w, (1.0 - s) / s);
}

GridPath sample_stable_path(double s, double dt, std::size_t n_steps, RngStream& rng) {
    require_grid_args(dt, n_steps);
    if (!(s > 0.0) || !(s < 2.0))
        throw std::invalid_argument("stability index must lie in (0,2)");

    GridPath path;
    path.dt = dt;
    path.values.resize(n_steps + 1);
    path.values[0] = 0.0;
    const double scale = std::pow(dt, 1.0 / s);
    for (std::size_t k = 0; k < n_steps; ++k)
        path.values[k + 1] = path.values[k] + scale * sample_standard_stable(s, rng);
    return path;
}

GridPath sample_fbm_path(double hurst, double dt, std::size_t n_steps,
                         RngStream& rng, bool force_cholesky) {
    require_grid_args(dt, n_steps);
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::invalid_argument("Hurst index must lie in (0,1)");

    std::vector<double> fgn;
    if (force_cholesky || !sample_fgn_circulant(hurst, n_steps, rng, fgn))
        sample_fgn_cholesky(hurst, n_steps, rng, fgn);

    GridPath path;
    path.dt = dt;
    path.values.resize(n_steps + 1);
    path.values[0] = 0.0;
    const double scale = std::pow(dt, hurst);
    for (std::size_t k = 0; k < n_steps; ++k)
        path.values[k + 1] = path.values[k] + scale * fgn[k];
    return path;
}

GridPath sample_noise_path(const NoiseModel& model, double dt, std::size_t n_steps,
                           RngStream& rng) {
    switch (model.kind) {
        case NoiseModel::Kind::Brownian:
            return sample_brownian_path(dt, n_steps, rng);
        case NoiseModel::Kind::SymmetricStable:
            return sample_stable_path(model.stability_index, dt, n_steps, rng);
        case NoiseModel::Kind::FractionalBrownian:
            return sample_fbm_path(model.hurst, dt, n_steps, rng);
    }
    throw std::invalid_argument("unknown noise kind");
}

TestReport verify_self_similarity(const NoiseModel& model, double a, double t,
                                  std::size_t n_samples, RngStream& rng,
                                  double significance) {
    if (!(a > 0.0) || !(t > 0.0))
        throw std::invalid_argument("verify_self_similarity: a and t must be positive");
    if (n_samples < 100)
        throw std::invalid_argument("verify_self_similarity: need at least 100 samples");

    const double beta = self_similarity_index(model);
    const std::size_t steps = 16; // marginal at the endpoint is exact in law

    std::vector<double> scaled_time(n_samples), scaled_space(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        scaled_time[i] = sample_noise_path(model, a * t / steps, steps, rng).values.back();
    const double factor = std::pow(a, beta);
    for (std::size_t i = 0; i < n_samples; ++i)
        scaled_space[i] = factor * sample_noise_path(model, t / steps, steps, rng).values.back();

    return ks_two_sample(std::move(scaled_time), std::move(scaled_space), significance);
}

std::vector<CovarianceCheck> verify_fbm_covariance(
    double hurst, double dt, std::size_t n_steps,
    std::span<const std::pair<std::size_t, std::size_t>> index_pairs,
    std::size_t n_paths, RngStream& rng) {
    if (n_paths < 2)
        throw std::invalid_argument("verify_fbm_covariance: need at least 2 paths");
    for (auto [j, k] : index_pairs)
        if (j > n_steps || k > n_steps)
            throw std::invalid_argument("verify_fbm_covariance: pair index beyond grid");

    // Accumulate products per pair across the ensemble.
    std::vector<double> sum(index_pairs.size(), 0.0);
    std::vector<double> sum_sq(index_pairs.size(), 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        GridPath path = sample_fbm_path(hurst, dt, n_steps, rng);
        for (std::size_t q = 0; q < index_pairs.size(); ++q) {
            double prod = path.values[index_pairs[q].first] *
                          path.values[index_pairs[q].second];
            sum[q] += prod;
            sum_sq[q] += prod * prod;
        }
    }

    std::vector<CovarianceCheck> out(index_pairs.size());
    const double n = static_cast<double>(n_paths);
    for (std::size_t q = 0; q < index_pairs.size(); ++q) {
        double s = static_cast<double>(index_pairs[q].first) * dt;
        double t = static_cast<double>(index_pairs[q].second) * dt;
        double h2 = 2.0 * hurst;
        double expected = 0.5 * (std::pow(s, h2) + std::pow(t, h2) -
                                 std::pow(std::abs(t - s), h2));
        double mean = sum[q] / n;
        double var = std::max(sum_sq[q] / n - mean * mean, 0.0);
        double se = std::sqrt(var / n);
        out[q] = CovarianceCheck{s, t, expected, mean, se,
                                 std::abs(mean - expected) <= 3.0 * se};
    }
    return out;
}

std::vector<CfCheck> verify_stable_cf(double s, std::span<const double> lambdas,
                                      std::size_t n_draws, RngStream& rng) {
    if (n_draws < 2)
        throw std::invalid_argument("verify_stable_cf: need at least 2 draws");

    std::vector<double> draws(n_draws);
    for (double& x : draws) x = sample_standard_stable(s, rng);

    std::vector<CfCheck> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        double sum = 0.0, sum_sq = 0.0;
        for (double x : draws) {
            double c = std::cos(lambda * x);
            sum += c;
            sum_sq += c * c;
        }
        double n = static_cast<double>(n_draws);
        double mean = sum / n;
        double var = std::max(sum_sq / n - mean * mean, 0.0);
        double se = std::sqrt(var / n);
        double expected = std::exp(-std::pow(std::abs(lambda), s));
        out.push_back(CfCheck{lambda, expected, mean, se,
                              std::abs(mean - expected) <= 3.0 * se});
    }
    return out;
}

std::size_t envelope_violations(const GridPath& path, double beta, double margin,
                                double excess) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        double t = path.time_at(k);
        if (t <= 0.0) continue;
        if (std::abs(path.values[k]) > margin + std::pow(t, beta + excess)) ++count;
    }
    return count;
}

} // namespace znsim
