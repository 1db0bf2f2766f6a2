#include "znsim/sde.h"

#include <cmath>
#include <stdexcept>

#include "znsim/errors.h"

namespace znsim {

namespace {

constexpr double kBlowUpGuard = 1e12;

// max(|x|, floor)^alpha, with the two hot-path exponents special-cased. Both
// integrators and the public drift() share this so their step arithmetic is
// identical operation for operation.
inline double drift_magnitude(double abs_x, double alpha, double floor) {
    double u = abs_x < floor ? floor : abs_x;
    if (alpha == 0.0) return 1.0;
    if (alpha == 0.5) return std::sqrt(u);
    return std::pow(u, alpha);
}

} // namespace

void validate(const DriftParams& p) {
    if (!(p.c_plus > 0.0) || !(p.c_minus > 0.0))
        throw std::invalid_argument("drift: c_plus and c_minus must be positive");
    if (!(p.alpha > -1.0) || !(p.alpha < 1.0))
        throw std::invalid_argument("drift: alpha must lie in (-1,1)");
}

double drift(double x, const DriftParams& p, double floor) {
    validate(p);
    if (floor < 0.0)
        throw std::invalid_argument("drift: floor must be nonnegative");
    if (floor == 0.0 && p.alpha < 0.0 && x == 0.0)
        throw std::invalid_argument("drift: unbounded at 0 for alpha < 0 without a floor");
    double mag = drift_magnitude(std::abs(x), p.alpha, floor);
    return x >= 0.0 ? p.c_plus * mag : -(p.c_minus * mag);
}

double default_drift_floor(double alpha, double dt) {
    return alpha < 0.0 ? std::pow(dt, 1.0 / (1.0 - alpha)) : 0.0;
}

double exact_extremal_solution(double t, double c, double alpha, int sign) {
    double base = c * (1.0 - alpha) * t;
    return static_cast<double>(sign) * std::pow(base, 1.0 / (1.0 - alpha));
}

double ode_limit_solution(double t, double tau, int sign, double c, double alpha) {
    if (t <= tau) return 0.0;
    return exact_extremal_solution(t - tau, c, alpha, sign);
}

void validate(const SimConfig& config) {
    validate(config.drift);
    self_similarity_index(config.noise); // throws on invalid noise parameters
    if (!(config.epsilon > 0.0))
        throw std::invalid_argument("config: epsilon must be positive");
    if (!(config.horizon > 0.0))
        throw std::invalid_argument("config: horizon must be positive");
    if (!(config.dt > 0.0))
        throw std::invalid_argument("config: dt must be positive");
    if (config.dt > config.horizon)
        throw std::invalid_argument("config: dt must not exceed horizon");
    if (config.drift_floor < 0.0)
        throw std::invalid_argument("config: drift_floor must be nonnegative");
    if (config.drift.alpha < 0.0 && !(config.drift_floor > 0.0))
        throw std::invalid_argument("config: drift_floor must be positive when alpha < 0");
}

std::size_t step_count(const SimConfig& config) {
    auto n = std::llround(config.horizon / config.dt);
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

GridPath integrate_euler(const SimConfig& config, const GridPath& noise) {
    validate(config);
    if (noise.dt != config.dt)
        throw std::invalid_argument("integrate_euler: noise grid step differs from config.dt");
    if (noise.t_start != 0.0)
        throw std::invalid_argument("integrate_euler: noise path must start at t=0");
    const std::size_t n = step_count(config);
    if (noise.values.size() < n + 1)
        throw std::invalid_argument("integrate_euler: noise path does not cover the horizon");

    const DriftParams& p = config.drift;
    const double dt = config.dt;
    const double floor = config.drift_floor;
    const double eps = config.epsilon;

    GridPath out;
    out.dt = dt;
    out.values.resize(n + 1);

    double x = config.x0;
    out.values[0] = x;
    double f_prev = eps * noise.values[0];
    for (std::size_t k = 0; k < n; ++k) {
        double mag = drift_magnitude(std::abs(x), p.alpha, floor);
        double dr = x >= 0.0 ? p.c_plus * mag : -(p.c_minus * mag);
        double f_curr = eps * noise.values[k + 1];
        x = euler_step(x, dr, dt, f_prev, f_curr);
        if (!(std::abs(x) <= kBlowUpGuard))
            throw DivergedError("integrate_euler: solution diverged", k + 1);
        out.values[k + 1] = x;
        f_prev = f_curr;
    }
    return out;
}

GridPath integrate_perturbed_ode(double x0, double c, double alpha,
                                 const std::function<double(double)>& g,
                                 double horizon, double dt, double floor) {
    if (!(c > 0.0))
        throw std::invalid_argument("integrate_perturbed_ode: c must be positive");
    if (!(alpha > -1.0) || !(alpha < 1.0))
        throw std::invalid_argument("integrate_perturbed_ode: alpha must lie in (-1,1)");
    if (!(dt > 0.0) || !(horizon > 0.0) || dt > horizon)
        throw std::invalid_argument("integrate_perturbed_ode: need 0 < dt <= horizon");
    if (floor < 0.0)
        throw std::invalid_argument("integrate_perturbed_ode: floor must be nonnegative");
    if (alpha < 0.0 && !(floor > 0.0))
        throw std::invalid_argument("integrate_perturbed_ode: floor must be positive when alpha < 0");

    auto steps = std::llround(horizon / dt);
    const std::size_t n = steps < 1 ? 1 : static_cast<std::size_t>(steps);

    GridPath out;
    out.dt = dt;
    out.values.resize(n + 1);

    double x = x0;
    out.values[0] = x;
    double f_prev = g(0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double mag = drift_magnitude(std::abs(x), alpha, floor);
        double dr = c * mag;
        double f_curr = g(static_cast<double>(k + 1) * dt);
        x = euler_step(x, dr, dt, f_prev, f_curr);
        if (!(std::abs(x) <= kBlowUpGuard))
            throw DivergedError("integrate_perturbed_ode: solution diverged", k + 1);
        out.values[k + 1] = x;
        f_prev = f_curr;
    }
    return out;
}

} // namespace znsim
