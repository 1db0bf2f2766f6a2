// Samplers for the three self-similar driving noises (Brownian motion,
// symmetric stable Levy, fractional Brownian motion) plus statistical
// verification of their defining properties.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "znsim/grid_path.h"
#include "znsim/rng.h"
#include "znsim/stats.h"

namespace znsim {

struct NoiseModel {
    enum class Kind { Brownian, SymmetricStable, FractionalBrownian };

    Kind kind = Kind::Brownian;
    double stability_index = 0.0; // s, for SymmetricStable; must lie in (0,2)
    double hurst = 0.0;           // H, for FractionalBrownian; must lie in (0,1)

    static NoiseModel brownian();
    static NoiseModel symmetric_stable(double s);
    static NoiseModel fractional_brownian(double hurst);
};

// Self-similarity index beta: 1/2 for Brownian, 1/s for stable, H for fBm.
double self_similarity_index(const NoiseModel& model);

// Brownian path on {0, dt, ..., n_steps*dt}: cumulative sum of N(0, dt)
// increments, values[0] = 0.
GridPath sample_brownian_path(double dt, std::size_t n_steps, RngStream& rng);

// Symmetric s-stable path: i.i.d. increments with scale dt^{1/s}, sampled by
// the Chambers-Mallows-Stuck transform. values[0] = 0.
GridPath sample_stable_path(double s, double dt, std::size_t n_steps, RngStream& rng);

// Fractional Brownian path with Hurst index H: circulant embedding of the
// increment process (exact in distribution when the embedding is
// nonnegative-definite), dense Cholesky of the increment covariance as
// fallback. force_cholesky exists so tests can cross-check the two routes.
GridPath sample_fbm_path(double hurst, double dt, std::size_t n_steps,
                         RngStream& rng, bool force_cholesky = false);

// Dispatch on model.kind.
GridPath sample_noise_path(const NoiseModel& model, double dt, std::size_t n_steps,
                           RngStream& rng);

// One standard symmetric s-stable variate (scale 1).
double sample_standard_stable(double s, RngStream& rng);

// Draws n_samples of B(a*t) and n_samples of a^beta * B(t) through the actual
// samplers and KS-tests the two against each other; they are equal in law for
// a self-similar process of index beta.
TestReport verify_self_similarity(const NoiseModel& model, double a, double t,
                                  std::size_t n_samples, RngStream& rng,
                                  double significance = 0.01);

struct CovarianceCheck {
    double s = 0.0;
    double t = 0.0;
    double expected = 0.0;
    double estimated = 0.0;
    double standard_error = 0.0;
    bool within_3se = false;
};

// Monte-Carlo check of the fBm covariance R(s,t) = (s^{2H}+t^{2H}-|t-s|^{2H})/2
// at the given grid-index pairs, over an ensemble of n_paths paths.
std::vector<CovarianceCheck> verify_fbm_covariance(
    double hurst, double dt, std::size_t n_steps,
    std::span<const std::pair<std::size_t, std::size_t>> index_pairs,
    std::size_t n_paths, RngStream& rng);

struct CfCheck {
    double lambda = 0.0;
    double expected = 0.0;
    double estimated = 0.0;
    double standard_error = 0.0;
    bool within_3se = false;
};

// Empirical characteristic function of unit-time stable increments against
// exp(-|lambda|^s) at each requested frequency.
std::vector<CfCheck> verify_stable_cf(double s, std::span<const double> lambdas,
                                      std::size_t n_draws, RngStream& rng);

// Diagnostic: number of grid points where |B(t)| exceeds M + t^{beta+excess}.
// Large counts indicate the sampled path leaves the growth envelope expected
// of an index-beta self-similar noise.
std::size_t envelope_violations(const GridPath& path, double beta, double margin,
                                double excess);

} // namespace znsim
