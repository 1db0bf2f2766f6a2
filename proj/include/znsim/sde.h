// The singular drift, its exact limit solutions, and explicit Euler
// integration of the noisy and deterministically perturbed equations.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "znsim/grid_path.h"
#include "znsim/noise.h"

namespace znsim {

// Drift a(x) = (c_plus*1{x>=0} - c_minus*1{x<0}) * |x|^alpha.
struct DriftParams {
    double c_plus = 1.0;
    double c_minus = 1.0;
    double alpha = 0.0; // must lie in (-1,1)
};

void validate(const DriftParams& p);

// Regularized drift: |x| is floored at `floor` before the power is taken, so
// the singularity at 0 for alpha < 0 stays bounded. floor = 0 is the exact
// drift and requires alpha >= 0 at x = 0.
double drift(double x, const DriftParams& p, double floor);

// Natural microscale regularization: dt^{1/(1-alpha)} when alpha < 0 (the
// self-similar scale of one step), 0 otherwise.
double default_drift_floor(double alpha, double dt);

// The extremal solution sign * (c(1-alpha)t)^{1/(1-alpha)} of y' = c|y|^alpha.
double exact_extremal_solution(double t, double c, double alpha, int sign);

// The full solution family of the limit ODE: 0 up to departure time tau, then
// the extremal branch restarted at tau. tau may be +infinity (never departs).
double ode_limit_solution(double t, double tau, int sign, double c, double alpha);

struct SimConfig {
    DriftParams drift;
    NoiseModel noise;
    double epsilon = 1.0; // noise amplitude, > 0
    double x0 = 0.0;
    double horizon = 1.0; // > 0
    double dt = 0.01;     // > 0, <= horizon
    std::uint64_t seed = 0;
    double drift_floor = 0.0; // >= 0; must be > 0 when alpha < 0
};

void validate(const SimConfig& config);

// Number of Euler steps implied by the config (horizon/dt, rounded).
std::size_t step_count(const SimConfig& config);

// Explicit Euler step of X' = drift + forcing increment:
//   X_{k+1} = X_k + dr*dt + (f_curr - f_prev).
// Shared by both integrators below so that integrate_euler with forcing
// epsilon*noise reproduces integrate_perturbed_ode bit for bit.
inline double euler_step(double x, double dr, double dt, double f_prev, double f_curr) {
    return x + dr * dt + (f_curr - f_prev);
}

// Euler scheme for X_{k+1} = X_k + drift(X_k)*dt + epsilon*(B_{k+1}-B_k) on
// the noise path's grid. The noise must start at t=0, share the config step
// and cover the horizon. Any |X| beyond 1e12 aborts with DivergedError.
GridPath integrate_euler(const SimConfig& config, const GridPath& noise);

// Euler scheme for the perturbed integral equation
//   y(t) = x0 + c * integral |y|^alpha + g(t),
// with g evaluated on the grid. Error behaviour mirrors integrate_euler.
GridPath integrate_perturbed_ode(double x0, double c, double alpha,
                                 const std::function<double(double)>& g,
                                 double horizon, double dt, double floor = 0.0);

} // namespace znsim
