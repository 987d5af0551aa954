#pragma once

#include <cstdint>

#include "graphflow/action.hpp"
#include "graphflow/elliptic.hpp"

// Distance computation: convex minimization of the discrete action for
// the unbalanced metric W, the conservative (h = 0) restriction ME, and
// the shift-transport metric D.

namespace graphflow {

struct SolveOptions {
    int max_iterations = 40000;  // total quasi-Newton iteration budget
    double opt_tol = 1e-7;       // first-order residual on the smoothed problem
    std::vector<double> delta_schedule = {1e-2, 1e-3, 1e-4, 1e-6};
    std::uint64_t seed = 0;
    bool randomize_init = false;  // perturb the seed path (uniqueness probes)
    double init_noise = 0.05;
};

struct SolveReport {
    double value = 0.0;     // squared distance
    double distance = 0.0;  // sqrt(value)
    Trajectory trajectory;
    int iterations = 0;
    bool converged = false;
    double opt_residual = 0.0;
    double speed_variation = 0.0;     // max/min - 1 of the speed profile
    double min_interior_mass = 0.0;   // min over interior nodes and states
    bool has_shift = false;           // distance_D metadata
    double shift_h0 = 0.0;
    double shift_h1 = 0.0;
};

// Unbalanced distance: minimizes the quadratic action over interior node
// measures, interval fluxes and interval sources subject to the discrete
// continuity equation with fixed endpoints. delta-smoothed continuation
// with warm starts; final value evaluated with the exact mobility.
SolveReport distance_W(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                       const SolveOptions& opts = {});

// Conservative restriction: the same minimization with the source frozen
// at zero. Requires total_mass(mu0) == total_mass(mu1) within 1e-10.
SolveReport distance_ME(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                        const SolveOptions& opts = {});

// Shift-transport metric: 1-D minimization over the initial shift H0 of
//   a^2 (|H0| + |H1|)^2 + b^2 len^2,  H1 = H0 + mass(mu0) - mass(mu1),
// where len is the conservative path length between the shifted measures
// and both shifts must keep the measures nonnegative. Coarse 17-point
// pre-scan followed by 40 golden-section iterations.
SolveReport distance_D(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                       const SolveOptions& opts = {});

struct NonlocalityDiagnostic {
    double min_interior_mass = 0.0;  // min over interior nodes and states of mu
    double min_abs_source = 0.0;     // min over intervals of |h_k|
    bool vacuous = false;            // endpoints coincide; nothing to assert
};

// Both quantities are expected strictly positive on converged minimizers
// between distinct endpoints, whatever the endpoint supports.
NonlocalityDiagnostic check_nonlocality(const SolveReport& report);

}  // namespace graphflow
