#include "znsim/scaling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "znsim/errors.h"

namespace znsim {

ScalingExponents scaling_exponents(double alpha, double beta) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("scaling_exponents: alpha must lie in (-1,1)");
    if (!(beta > 0.0))
        throw std::invalid_argument("scaling_exponents: beta must be positive");

    const double denom = (1.0 - alpha) * beta - 1.0;
    if (denom == 0.0)
        throw std::invalid_argument("scaling_exponents: degenerate scaling, (1-alpha)*beta = 1");

    ScalingExponents e{1.0 / denom, (1.0 - alpha) / denom};
    // The whole point of these exponents: the amplitude drops out,
    // eps^{1 + delta - gamma*beta} = 1.
    const double identity = 1.0 + e.delta - e.gamma * beta;
    const double scale = std::max({1.0, std::abs(e.delta), std::abs(e.gamma * beta)});
    if (std::abs(identity) > 1e-12 * scale)
        throw NumericalError("scaling_exponents: exponent identity violated");
    return e;
}

RegimeReport check_regime(double alpha, double beta, NoiseModel::Kind kind) {
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("check_regime: alpha must lie in (-1,1)");
    if (!(beta > 0.0))
        throw std::invalid_argument("check_regime: beta must be positive");

    RegimeReport report;
    report.alpha = alpha;
    report.beta = beta;
    report.condition_value = alpha + 1.0 / beta;
    report.regime_ok = report.condition_value > 1.0;

    switch (kind) {
        case NoiseModel::Kind::Brownian:
            report.uniqueness_note =
                "Brownian noise: the amplitude-1 equation has a unique strong "
                "solution for every alpha > -1.";
            break;
        case NoiseModel::Kind::SymmetricStable:
            report.uniqueness_note =
                report.regime_ok
                    ? "stable noise: alpha + 1/beta > 1 holds, so the amplitude-1 "
                      "equation has a unique solution."
                    : "stable noise: alpha + 1/beta <= 1; uniqueness is known to "
                      "fail for alpha + 1/beta < 1.";
            break;
        case NoiseModel::Kind::FractionalBrownian:
            report.uniqueness_note =
                (alpha >= 0.0 && report.regime_ok)
                    ? "fBm noise: alpha >= 0 and alpha + 1/H > 1 hold, so the "
                      "amplitude-1 equation has a unique solution."
                    : "fBm noise: uniqueness is established only for alpha >= 0 "
                      "with alpha + 1/H > 1, which fails here.";
            break;
    }
    return report;
}

GridPath rescale_path(const GridPath& src, double epsilon, const ScalingExponents& e) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("rescale_path: epsilon must be positive");
    validate(src);

    // The image of the source grid under t -> eps^gamma * t is itself uniform,
    // so the transformation is exact here.
    GridPath out;
    const double time_factor = std::pow(epsilon, e.gamma);
    const double space_factor = std::pow(epsilon, e.delta);
    out.t_start = time_factor * src.t_start;
    out.dt = time_factor * src.dt;
    out.values.resize(src.values.size());
    for (std::size_t k = 0; k < src.values.size(); ++k)
        out.values[k] = space_factor * src.values[k];
    return out;
}

GridPath rescale_path(const GridPath& src, double epsilon, const ScalingExponents& e,
                      double dt_out, std::size_t n_steps_out) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("rescale_path: epsilon must be positive");
    if (!(dt_out > 0.0))
        throw std::invalid_argument("rescale_path: dt_out must be positive");
    validate(src);

    const double time_factor = std::pow(epsilon, -e.gamma);
    const double space_factor = std::pow(epsilon, e.delta);
    const double t_src_max = time_factor * (static_cast<double>(n_steps_out) * dt_out);
    if (t_src_max > src.t_end() + 0.5 * src.dt || src.t_start > 0.5 * src.dt)
        throw std::invalid_argument("rescale_path: requested window exceeds the source horizon");

    GridPath out;
    out.t_start = 0.0;
    out.dt = dt_out;
    out.values.resize(n_steps_out + 1);
    for (std::size_t k = 0; k <= n_steps_out; ++k) {
        double t_src = time_factor * (static_cast<double>(k) * dt_out);
        out.values[k] = space_factor * value_near(src, t_src);
    }
    return out;
}

namespace {

GridPath zoom_impl(const GridPath& src, double n, double A, double t_end_out) {
    if (!(n > 0.0))
        throw std::invalid_argument("zoom_rescale: n must be positive");
    if (!(A > 0.0))
        throw std::invalid_argument("zoom_rescale: A must be positive");
    validate(src);

    const double time_factor = std::pow(n, 1.0 / A);
    const double dt_out = src.dt / time_factor;
    if (time_factor * t_end_out > src.t_end() + 0.5 * src.dt)
        throw std::invalid_argument("zoom_rescale: requested window exceeds the source horizon");

    GridPath out;
    out.t_start = src.t_start / time_factor;
    out.dt = dt_out;
    auto steps = std::llround((t_end_out - out.t_start) / dt_out);
    const std::size_t n_out = steps < 0 ? 0 : static_cast<std::size_t>(steps);
    out.values.resize(n_out + 1);
    for (std::size_t k = 0; k <= n_out; ++k) {
        double t_src = time_factor * (out.t_start + static_cast<double>(k) * dt_out);
        out.values[k] = value_near(src, t_src) / n;
    }
    return out;
}

} // namespace

GridPath zoom_rescale(const GridPath& src, double n, double A) {
    if (!(n > 0.0) || !(A > 0.0))
        throw std::invalid_argument("zoom_rescale: n and A must be positive");
    validate(src);
    return zoom_impl(src, n, A, src.t_end() / std::pow(n, 1.0 / A));
}

GridPath zoom_rescale(const GridPath& src, double n, double A, double t_end_out) {
    return zoom_impl(src, n, A, t_end_out);
}

double sup_distance(const GridPath& path, const std::function<double(double)>& reference) {
    double sup = 0.0;
    for (std::size_t k = 0; k < path.values.size(); ++k)
        sup = std::max(sup, std::abs(path.values[k] - reference(path.time_at(k))));
    return sup;
}

namespace {

// Log-spaced times in [t_lo, t_hi] snapped to the path grid, deduplicated.
std::vector<std::size_t> log_spaced_indices(const GridPath& path, double t_lo,
                                            double t_hi, std::size_t n_points) {
    if (!(t_lo > 0.0))
        throw std::invalid_argument("window must start after t=0");
    if (!(t_hi > t_lo))
        throw std::invalid_argument("window must have positive length");
    if (t_lo < path.t_start - 0.5 * path.dt || t_hi > path.t_end() + 0.5 * path.dt)
        throw std::invalid_argument("window must lie inside the grid");
    if (n_points < 2)
        throw std::invalid_argument("need at least two window points");

    std::vector<std::size_t> indices;
    indices.reserve(n_points);
    const double ratio = t_hi / t_lo;
    for (std::size_t j = 0; j < n_points; ++j) {
        double t = t_lo * std::pow(ratio, static_cast<double>(j) /
                                              static_cast<double>(n_points - 1));
        std::size_t idx = nearest_index(path, t);
        if (indices.empty() || idx != indices.back()) indices.push_back(idx);
    }
    return indices;
}

} // namespace

RatioStats asymptotic_ratio(const GridPath& path, double c, double alpha,
                            double t_lo, double t_hi, std::size_t n_points) {
    auto indices = log_spaced_indices(path, t_lo, t_hi, n_points);

    RatioStats stats;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t idx : indices) {
        double t = path.time_at(idx);
        double ref = exact_extremal_solution(t, c, alpha, +1);
        double r = path.values[idx] / ref;
        sum += r;
        stats.min = std::min(stats.min, r);
        stats.max = std::max(stats.max, r);
    }
    stats.mean = sum / static_cast<double>(indices.size());
    return stats;
}

EscapeClass classify_escape(const GridPath& path, double K, double tail_fraction) {
    if (!(K > 0.0))
        throw std::invalid_argument("classify_escape: threshold must be positive");
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw std::invalid_argument("classify_escape: tail_fraction must lie in (0,1]");
    validate(path);

    const std::size_t last = path.values.size() - 1;
    const auto start = static_cast<std::size_t>(
        std::ceil((1.0 - tail_fraction) * static_cast<double>(last)));

    bool all_above = true, all_below = true;
    for (std::size_t k = start; k <= last; ++k) {
        if (!(path.values[k] > K)) all_above = false;
        if (!(path.values[k] < -K)) all_below = false;
        if (!all_above && !all_below) return EscapeClass::Undecided;
    }
    if (all_above) return EscapeClass::Plus;
    if (all_below) return EscapeClass::Minus;
    return EscapeClass::Undecided;
}

double default_escape_threshold(const DriftParams& p, double t_lo) {
    validate(p);
    if (!(t_lo > 0.0))
        throw std::invalid_argument("default_escape_threshold: t_lo must be positive");
    const double c_min = std::min(p.c_plus, p.c_minus);
    return exact_extremal_solution(t_lo, c_min, p.alpha, +1) / 5.0;
}

} // namespace znsim
