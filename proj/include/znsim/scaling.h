// Space-time rescaling, regime validation, zoom rescaling, and asymptotic
// path diagnostics.
#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "znsim/grid_path.h"
#include "znsim/noise.h"
#include "znsim/sde.h"

namespace znsim {

// Exponents of the transformation X~(t) = eps^delta * X(eps^{-gamma} t) that
// maps the amplitude-eps equation onto the amplitude-1 equation.
struct ScalingExponents {
    double delta = 0.0;
    double gamma = 0.0;
};

// delta = 1/((1-alpha)*beta - 1), gamma = (1-alpha)*delta. Throws when
// (1-alpha)*beta = 1 (degenerate scaling). The exponent identity
// 1 + delta - gamma*beta = 0 holds by construction and is asserted.
ScalingExponents scaling_exponents(double alpha, double beta);

struct RegimeReport {
    double alpha = 0.0;
    double beta = 0.0;
    double condition_value = 0.0; // alpha + 1/beta
    bool regime_ok = false;       // condition_value > 1
    std::string uniqueness_note;
};

// Evaluates the standing condition alpha + 1/beta > 1 and summarizes what is
// known about uniqueness of the amplitude-1 equation for the given noise kind.
RegimeReport check_regime(double alpha, double beta, NoiseModel::Kind kind);

// The rescaled path t -> eps^delta * X(eps^{-gamma} t) on its natural image
// grid (dt_out = eps^gamma * src.dt); exact, no resampling.
GridPath rescale_path(const GridPath& src, double epsilon, const ScalingExponents& e);

// Same transformation resampled onto the grid {0, dt_out, ..., n_steps_out
// steps} by nearest-grid-point lookup (no interpolation: jump paths must not
// be smoothed). Throws when the requested window maps outside the source grid.
GridPath rescale_path(const GridPath& src, double epsilon, const ScalingExponents& e,
                      double dt_out, std::size_t n_steps_out);

// Zoom rescaling g_n(t) = f(n^{1/A} t)/n on its natural grid
// (dt_out = n^{-1/A} * src.dt), optionally truncated to [0, t_end_out].
GridPath zoom_rescale(const GridPath& src, double n, double A);
GridPath zoom_rescale(const GridPath& src, double n, double A, double t_end_out);

// Max over grid points of |path_k - reference(t_k)|.
double sup_distance(const GridPath& path, const std::function<double(double)>& reference);

struct RatioStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Statistics of path(t) / (c(1-alpha)t)^{1/(1-alpha)} over a log-spaced
// subgrid of [t_lo, t_hi] snapped to grid points (asymptotics live on
// multiplicative scales). t_lo must be positive: the reference vanishes at 0.
RatioStats asymptotic_ratio(const GridPath& path, double c, double alpha,
                            double t_lo, double t_hi, std::size_t n_points = 64);

enum class EscapeClass { Plus, Minus, Undecided };

// Plus if every sample in the final tail_fraction of the grid exceeds +K,
// Minus if every such sample is below -K, Undecided otherwise.
EscapeClass classify_escape(const GridPath& path, double K, double tail_fraction);

// Default escape threshold: the extremal envelope of the slower side at the
// tail start, divided by 5. Well below where an escaped path must sit, yet
// far above the noise scale for horizons in the asymptotic regime.
double default_escape_threshold(const DriftParams& p, double t_lo);

} // namespace znsim
