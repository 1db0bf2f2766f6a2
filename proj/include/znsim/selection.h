// Monte-Carlo estimation of the selection probabilities, the growth-rate fit,
// and the scale-function oracle for the Brownian case.
#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "znsim/scaling.h"
#include "znsim/sde.h"
#include "znsim/stats.h"

namespace znsim {

struct SelectionEstimate {
    std::size_t n_total = 0;
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    std::size_t n_undecided = 0;
    bool any_decided = false;
    // Defined only when any_decided: p among decided paths and its Wilson 95%
    // interval. NaN otherwise.
    double p_plus_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct ClassifyParams {
    // Escape threshold; when absent, default_escape_threshold at the tail
    // start is used.
    std::optional<double> threshold;
    double tail_fraction = 0.2;
};

// The noise and solution paths for ensemble member path_index, generated from
// the stream (config.seed, path_index). The building block of every ensemble
// command; exposed so single-path runs and ensembles share one definition.
std::pair<GridPath, GridPath> simulate_path(const SimConfig& config,
                                            std::uint64_t path_index);

// Simulates n_paths independent paths, classifies each, and aggregates.
// Deterministic given (config, n_paths) for any jobs value: path i always uses
// stream (config.seed, i) and counts are order-independent. jobs = 0 means
// hardware concurrency. Throws RegimeError when the regime condition fails,
// unless allow_regime_violation.
SelectionEstimate estimate_selection(const SimConfig& config, std::size_t n_paths,
                                     const ClassifyParams& classify = {},
                                     unsigned jobs = 0,
                                     bool allow_regime_violation = false);

// Escape probability upward for the amplitude-1 Brownian equation via the
// classical scale-function identity: with
//   I(c) = integral_0^infty exp(-2c u^{1+alpha}/(1+alpha)) du,
// p_plus = I(c_minus) / (I(c_plus) + I(c_minus)). Adaptive quadrature with
// relative error <= 1e-8. Requires alpha > -1.
double scale_function_oracle(const DriftParams& p);

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theory_exponent = 0.0;    // 1/(1-alpha)
    double theory_coefficient = 0.0; // (c(1-alpha))^{1/(1-alpha)}
};

// Least-squares fit of log|X| against log t over a log-spaced subgrid of
// [t_lo, t_hi]. side selects which drift constant the theory columns use and
// must be Plus or Minus.
GrowthFit growth_rate_fit(const GridPath& path, double t_lo, double t_hi,
                          const DriftParams& p, EscapeClass side,
                          std::size_t n_points = 64);

// estimate_selection at each amplitude over the same physical horizon; the
// rescaling identity says the estimates should agree within their CIs.
std::vector<std::pair<double, SelectionEstimate>> zero_noise_sweep(
    const SimConfig& base, const std::vector<double>& epsilons, std::size_t n_paths,
    const ClassifyParams& classify = {}, unsigned jobs = 0,
    bool allow_regime_violation = false);

struct ScalingCheckCell {
    double epsilon = 0.0;
    double t = 0.0;
    TestReport report;
};

// For each epsilon and checkpoint t, KS-compares the marginal of the rescaled
// process eps^delta X_eps(eps^{-gamma} t) against the marginal of the
// amplitude-1 process X_1(t). Each epsilon is simulated on the grid
// dt_eps = eps^{-gamma} * config.dt, whose image under the rescaling is
// exactly the reference grid. config.horizon must cover every checkpoint.
std::vector<ScalingCheckCell> verify_scaling_invariance(
    const SimConfig& config, const std::vector<double>& epsilons,
    const std::vector<double>& checkpoints, std::size_t n_samples,
    double significance = 0.01, unsigned jobs = 0);

} // namespace znsim
