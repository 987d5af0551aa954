#pragma once

#include <cstdint>

#include "graphflow/transport.hpp"

// Strong geodesic ODE system: right-hand sides, adaptive RK4 ray
// integration, the ray-fan experiment, and two-point shooting.

namespace graphflow {

// Phase-space point of the geodesic flow: the measure, the scalar source
// momentum and the antisymmetric edge momentum. The gradient field is
// carried directly (never a potential) so no gauge can drift.
struct GeodesicState {
    Measure mu;
    double h = 0.0;
    EdgeField grad_psi;
};

struct GeodesicDerivative {
    Vec mu_dot;
    double h_dot = 0.0;
    EdgeField grad_psi_dot;
};

enum class StopReason { reached_Tmax, boundary_touch, step_underflow };
const char* to_string(StopReason r);

struct RaySample {
    double t;
    GeodesicState state;
    double speed;  // a^2 h^2 + b^2 ||grad_psi||_mu^2
};

struct RayResult {
    std::vector<RaySample> trajectory;
    StopReason stop_reason = StopReason::reached_Tmax;
    double stop_time = 0.0;
    double speed_drift = 0.0;  // max relative deviation of the conserved speed
};

struct IntegrateOptions {
    double t_max = 3.0;
    double eps_bd = 1e-6;    // boundary threshold on min_x mu(x)
    double dt_min = 5e-4;    // step-underflow threshold
    double rtol = 1e-7;      // local error per unit time
    double dt_init = 1e-3;
};

// Time derivative of the geodesic flow at an interior state:
//   mu_dot(x)  = h p(x) - sum_w grad_psi(x,w) theta(mu(x),mu(w)) K(x,w),
//   h_dot      = -(b^2/2a^2) sum_{z,w} grad_psi(z,w)^2
//                  d1theta(mu(z),mu(w)) K(z,w) pi(z) p(z),
//   grad_psi_dot = gradient of the per-node kinetic density
//                  -(1/2) sum_z grad_psi(z,.)^2 K(.,z) d1theta(mu(.),mu(z)).
// Throws BoundaryContact when some mu(x) <= 0.
GeodesicDerivative geodesic_rhs(const GeodesicState& state, const MarkovChain& chain);

// RK4 with step doubling (safety 0.9, growth cap x2, order-5 estimate).
// Stops at t_max, when min_x mu(x) <= eps_bd, or when the accepted step
// falls below dt_min; precedence boundary > underflow > t_max.
RayResult integrate_ray(const GeodesicState& init, const MarkovChain& chain,
                        const IntegrateOptions& opts = {});

// n_rays unit-speed rays from a strictly positive start. For n = 2 states
// the directions are (cos 2 pi k/n_rays, sin 2 pi k/n_rays) in the
// (free potential component, source) plane, the potential embedded as
// (0, psi_free); for larger chains directions are sampled uniformly on
// the unit sphere of (psi mod constants, h) and speed-normalized.
std::vector<RayResult> ray_fan(const Measure& start, const MarkovChain& chain, int n_rays,
                               const IntegrateOptions& opts = {}, std::uint64_t seed = 0);

struct ShootOptions {
    double bvp_tol = 1e-8;   // terminal max-norm mismatch
    int max_newton = 60;
    double fd_step = 1e-6;   // Jacobian finite-difference step
    double rtol = 1e-9;      // integrator tolerance during shooting
    int warm_start_N = 32;   // convex-solver grid for the initial momenta
    bool use_warm_start = true;
};

// Two-point boundary value wrapper: finds initial momenta whose geodesic
// reaches mu1 at t = 1, by damped Newton on the terminal mismatch with a
// finite-difference Jacobian. The convex solver's recovered first-interval
// momenta provide the default initial guess. Returns the path action
// (= conserved speed) as value.
SolveReport shoot(const Measure& mu0, const Measure& mu1, const MarkovChain& chain,
                  const ShootOptions& opts = {});

}  // namespace graphflow
