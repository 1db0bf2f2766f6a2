#include "znsim/selection.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "znsim/errors.h"
#include "znsim/parallel.h"

namespace znsim {

namespace {

void require_regime(const SimConfig& config, bool allow_violation) {
    const double beta = self_similarity_index(config.noise);
    RegimeReport report = check_regime(config.drift.alpha, beta, config.noise.kind);
    if (!report.regime_ok && !allow_violation)
        throw RegimeError("regime condition alpha + 1/beta > 1 fails (value " +
                          std::to_string(report.condition_value) + "); " +
                          report.uniqueness_note);
}

double resolve_threshold(const SimConfig& config, const ClassifyParams& classify) {
    if (classify.threshold) {
        if (!(*classify.threshold > 0.0))
            throw std::invalid_argument("classification threshold must be positive");
        return *classify.threshold;
    }
    const double t_lo = (1.0 - classify.tail_fraction) * config.horizon;
    if (!(t_lo > 0.0)) // tail_fraction = 1 watches the whole path; anchor at one step
        return default_escape_threshold(config.drift, config.dt);
    return default_escape_threshold(config.drift, t_lo);
}

} // namespace

std::pair<GridPath, GridPath> simulate_path(const SimConfig& config,
                                            std::uint64_t path_index) {
    validate(config);
    RngStream rng(config.seed, path_index);
    GridPath noise = sample_noise_path(config.noise, config.dt, step_count(config), rng);
    GridPath solution = integrate_euler(config, noise);
    return {std::move(noise), std::move(solution)};
}

SelectionEstimate estimate_selection(const SimConfig& config, std::size_t n_paths,
                                     const ClassifyParams& classify, unsigned jobs,
                                     bool allow_regime_violation) {
    validate(config);
    if (n_paths == 0)
        throw std::invalid_argument("estimate_selection: n_paths must be at least 1");
    require_regime(config, allow_regime_violation);

    const double threshold = resolve_threshold(config, classify);
    const double tail_fraction = classify.tail_fraction;

    std::atomic<std::size_t> n_plus{0}, n_minus{0}, n_undecided{0};
    parallel_for_blocks(n_paths, jobs, [&](std::size_t begin, std::size_t end) {
        std::size_t plus = 0, minus = 0, undecided = 0;
        for (std::size_t i = begin; i < end; ++i) {
            auto [noise, solution] = simulate_path(config, i);
            switch (classify_escape(solution, threshold, tail_fraction)) {
                case EscapeClass::Plus: ++plus; break;
                case EscapeClass::Minus: ++minus; break;
                case EscapeClass::Undecided: ++undecided; break;
            }
        }
        n_plus += plus;
        n_minus += minus;
        n_undecided += undecided;
    });

    SelectionEstimate est;
    est.n_total = n_paths;
    est.n_plus = n_plus.load();
    est.n_minus = n_minus.load();
    est.n_undecided = n_undecided.load();

    const std::size_t decided = est.n_plus + est.n_minus;
    est.any_decided = decided > 0;
    if (est.any_decided) {
        est.p_plus_hat = static_cast<double>(est.n_plus) / static_cast<double>(decided);
        Interval ci = wilson_interval(est.n_plus, decided);
        est.ci_low = ci.low;
        est.ci_high = ci.high;
    } else {
        est.p_plus_hat = std::numeric_limits<double>::quiet_NaN();
        est.ci_low = std::numeric_limits<double>::quiet_NaN();
        est.ci_high = std::numeric_limits<double>::quiet_NaN();
    }
    return est;
}

namespace {

// Adaptive Simpson refinement of integral f over [a,b], given the whole-
// interval Simpson estimate.
template <typename F>
double adapt_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate_segment(const F& f, double a, double b, double rel_tol) {
    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
    return adapt_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// integral_0^infty exp(-b u^p) du for b, p > 0, by segment doubling until the
// tail adds less than 1e-12 of the accumulated mass.
double exponential_power_integral(double b, double p) {
    auto f = [b, p](double u) { return std::exp(-b * std::pow(u, p)); };
    double total = integrate_segment(f, 0.0, 1.0, 1e-11);
    double lo = 1.0;
    for (int iter = 0; iter < 1100 && lo < 1e300; ++iter) {
        double segment = integrate_segment(f, lo, 2.0 * lo, 1e-11);
        total += segment;
        lo *= 2.0;
        if (segment < 1e-12 * total) break;
    }
    return total;
}

} // namespace

double scale_function_oracle(const DriftParams& p) {
    validate(p); // enforces alpha > -1, where both integrals converge
    const double power = 1.0 + p.alpha;
    const double i_plus = exponential_power_integral(2.0 * p.c_plus / power, power);
    const double i_minus = exponential_power_integral(2.0 * p.c_minus / power, power);
    return i_minus / (i_plus + i_minus);
}

GrowthFit growth_rate_fit(const GridPath& path, double t_lo, double t_hi,
                          const DriftParams& p, EscapeClass side,
                          std::size_t n_points) {
    validate(p);
    if (side == EscapeClass::Undecided)
        throw std::invalid_argument("growth_rate_fit: path must be classified Plus or Minus");

    const double c = side == EscapeClass::Plus ? p.c_plus : p.c_minus;

    // Log-spaced sample of the window, snapped to the grid.
    std::vector<double> ts, xs;
    {
        if (!(t_lo > 0.0))
            throw std::invalid_argument("growth_rate_fit: window must start after t=0");
        if (!(t_hi > t_lo))
            throw std::invalid_argument("growth_rate_fit: window must have positive length");
        if (t_lo < path.t_start - 0.5 * path.dt || t_hi > path.t_end() + 0.5 * path.dt)
            throw std::invalid_argument("growth_rate_fit: window must lie inside the grid");
        if (n_points < 2)
            throw std::invalid_argument("growth_rate_fit: need at least two points");
        const double ratio = t_hi / t_lo;
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (std::size_t j = 0; j < n_points; ++j) {
            double t = t_lo * std::pow(ratio, static_cast<double>(j) /
                                                  static_cast<double>(n_points - 1));
            std::size_t idx = nearest_index(path, t);
            if (idx == prev) continue;
            prev = idx;
            double v = path.values[idx];
            if (v == 0.0)
                throw std::invalid_argument("growth_rate_fit: zero value in window");
            ts.push_back(path.time_at(idx));
            xs.push_back(v);
        }
    }

    LineFit fit = loglog_fit(ts, xs);
    GrowthFit out;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    out.theory_exponent = 1.0 / (1.0 - p.alpha);
    out.theory_coefficient = std::pow(c * (1.0 - p.alpha), 1.0 / (1.0 - p.alpha));
    return out;
}

std::vector<std::pair<double, SelectionEstimate>> zero_noise_sweep(
    const SimConfig& base, const std::vector<double>& epsilons, std::size_t n_paths,
    const ClassifyParams& classify, unsigned jobs, bool allow_regime_violation) {
    if (epsilons.empty())
        throw std::invalid_argument("zero_noise_sweep: need at least one epsilon");

    std::vector<std::pair<double, SelectionEstimate>> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        if (!(eps > 0.0))
            throw std::invalid_argument("zero_noise_sweep: epsilons must be positive");
        SimConfig config = base;
        config.epsilon = eps;
        out.emplace_back(eps, estimate_selection(config, n_paths, classify, jobs,
                                                 allow_regime_violation));
    }
    return out;
}

std::vector<ScalingCheckCell> verify_scaling_invariance(
    const SimConfig& config, const std::vector<double>& epsilons,
    const std::vector<double>& checkpoints, std::size_t n_samples,
    double significance, unsigned jobs) {
    validate(config);
    if (epsilons.empty() || checkpoints.empty())
        throw std::invalid_argument("verify_scaling_invariance: need epsilons and checkpoints");
    if (n_samples < 25)
        throw std::invalid_argument("verify_scaling_invariance: need at least 25 samples");
    for (double t : checkpoints) {
        if (!(t > 0.0))
            throw std::invalid_argument("verify_scaling_invariance: checkpoints must be positive");
        if (t > config.horizon)
            throw std::invalid_argument("verify_scaling_invariance: checkpoint beyond horizon");
    }
    for (double eps : epsilons)
        if (!(eps > 0.0))
            throw std::invalid_argument("verify_scaling_invariance: epsilons must be positive");

    const double beta = self_similarity_index(config.noise);
    const ScalingExponents exps = scaling_exponents(config.drift.alpha, beta);
    const double t_max = *std::max_element(checkpoints.begin(), checkpoints.end());

    // One ensemble block per amplitude; block 0 is the amplitude-1 reference.
    // Sample i of block b uses stream (seed, b*n_samples + i).
    auto sample_block = [&](double eps, std::size_t block)
        -> std::vector<std::vector<double>> {
        SimConfig block_config = config;
        block_config.epsilon = eps;
        // Simulate on the grid whose image under the rescaling is the
        // reference grid, so marginals are compared at identical times.
        const double time_factor = std::pow(eps, -exps.gamma);
        block_config.dt = time_factor * config.dt;
        block_config.horizon = time_factor * t_max;
        const double space_factor = std::pow(eps, exps.delta);

        std::vector<std::vector<double>> values(checkpoints.size(),
                                                std::vector<double>(n_samples));
        parallel_for_blocks(n_samples, jobs, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                auto [noise, solution] =
                    simulate_path(block_config, block * n_samples + i);
                for (std::size_t q = 0; q < checkpoints.size(); ++q) {
                    double t_src = time_factor * checkpoints[q];
                    values[q][i] = space_factor * value_near(solution, t_src);
                }
            }
        });
        return values;
    };

    const auto reference = sample_block(1.0, 0);

    std::vector<ScalingCheckCell> cells;
    cells.reserve(epsilons.size() * checkpoints.size());
    for (std::size_t b = 0; b < epsilons.size(); ++b) {
        auto rescaled = sample_block(epsilons[b], b + 1);
        for (std::size_t q = 0; q < checkpoints.size(); ++q) {
            TestReport report =
                ks_two_sample(reference[q], rescaled[q], significance);
            cells.push_back(ScalingCheckCell{epsilons[b], checkpoints[q], report});
        }
    }
    return cells;
}

} // namespace znsim
