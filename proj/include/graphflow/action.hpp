#pragma once

#include <optional>
#include <vector>

#include "graphflow/calculus.hpp"

// Action functionals on discrete trajectories plus the two
// action-decreasing post-processing maps: decreasing rearrangement of
// the source and antisymmetrization of the flux.

namespace graphflow {

// Discrete curve on the uniform grid t_k = k/N:
//   mu  — N+1 node measures,
//   V   — N interval fluxes (canonical edge fields),
//   h   — N interval source rates,
//   psi — optional N interval potentials with
//         V_k = mobility(midpoint_k) * grad psi_k on the support class.
// The discrete continuity equation
//   (mu_{k+1} - mu_k) N + div V_k = h_k p
// must hold componentwise within ce_tol on every interval.
struct Trajectory {
    std::vector<Measure> mu;
    std::vector<EdgeField> V;
    Vec h;
    std::optional<std::vector<Vec>> psi;

    int intervals() const { return static_cast<int>(V.size()); }
    double dt() const { return 1.0 / intervals(); }
    Measure midpoint(int k) const { return 0.5 * (mu[k] + mu[k + 1]); }

    static Trajectory constant(const Measure& mu0, int N, const MarkovChain& chain);
};

// Default continuity tolerances: solver-produced trajectories carry
// forward-integration roundoff; hand-authored files get more slack.
inline constexpr double kCeTolSolver = 1e-9;
inline constexpr double kCeTolFile = 1e-6;

// Max-norm continuity defect over all intervals.
double continuity_residual(const Trajectory& traj, const MarkovChain& chain);

// Throws InvalidTrajectory when the continuity residual exceeds ce_tol,
// a node measure is negative, or the field sizes are inconsistent.
void validate_trajectory(const Trajectory& traj, const MarkovChain& chain,
                         double ce_tol = kCeTolSolver);

// A'(mu, V) = 1/2 sum_{x,y} alpha(V(x,y), mu(x), mu(y)) K(x,y) pi(x).
double transport_rate(const Measure& mu, const EdgeField& V, const MarkovChain& chain);

// dt * sum_k [ a^2 h_k^2 + b^2 A'(midpoint_k, V_k) ]; +inf propagates.
double action_quad(const Trajectory& traj, const MarkovChain& chain,
                   double ce_tol = kCeTolSolver);

// ( dt * sum_k sqrt(a^2 h_k^2 + b^2 A'(midpoint_k, V_k)) )^2.
// Jensen: always <= action_quad, with equality iff the per-interval
// amplitudes are equal.
double action_linsq(const Trajectory& traj, const MarkovChain& chain,
                    double ce_tol = kCeTolSolver);

// Shift-transport functional
//   a^2 (dt sum |h_k|)^2 + b^2 (dt sum sqrt(A'(midpoint_k, V_k)))^2.
double shift_cost(const Trajectory& traj, const MarkovChain& chain, double ce_tol = kCeTolSolver);

// Per-interval amplitude a^2 h_k^2 + b^2 A'(midpoint_k, V_k). A converged
// minimizer's profile is constant up to solver tolerance.
Vec speed_profile(const Trajectory& traj, const MarkovChain& chain);

// Replaces h by its descending sort and rebuilds the node measures by
// forward integration from mu_0 with the same fluxes. Endpoints and the
// multiset of h values are preserved; the rebuilt interior measures
// dominate the originals componentwise and the action never increases.
Trajectory rearrange_source(const Trajectory& traj, const MarkovChain& chain,
                            double ce_tol = kCeTolSolver);

// Replaces every V_k by its antisymmetric part. Divergences, hence
// continuity and endpoints, are unchanged; the action never increases.
Trajectory antisymmetrize(const Trajectory& traj, const MarkovChain& chain);

// Trajectory CSV: node rows carry t and mu, interval rows carry t
// (midpoint), h, speed and the V entries on kernel-support pairs.
std::string trajectory_to_csv(const Trajectory& traj, const MarkovChain& chain);
Trajectory trajectory_from_csv(const std::string& csv, const MarkovChain& chain,
                               double ce_tol = kCeTolFile);

}  // namespace graphflow
