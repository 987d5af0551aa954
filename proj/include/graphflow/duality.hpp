#pragma once

#include "graphflow/transport.hpp"

// Hamilton-Jacobi dual certificates: feasibility verification, dual-value
// evaluation, candidate construction from primal minimizers, and gap
// reporting. The dual side certifies lower bounds on half the squared
// distance; it is not an independent solver.

namespace graphflow {

inline constexpr double kFeasTol = 1e-8;

// Piecewise-linear-in-time potential on M+1 uniform node times.
// Feasible certificates have feasibility_margin <= kFeasTol; dual_value
// is evaluated with midpoint quadrature matching the primal grid.
struct DualCertificate {
    std::vector<Vec> phi;
    double feasibility_margin = 0.0;
    double dual_value = 0.0;

    int intervals() const { return static_cast<int>(phi.size()) - 1; }
};

struct HjOptions {
    int restarts = 8;         // seeded random starts, plus vertices and uniform
    int max_iterations = 150;
    std::uint64_t seed = 0;
};

// Value of the Hamilton-Jacobi form at a fixed nonnegative measure:
//   <phi_dot, mu>_pi + (1/2b^2) ||grad_phi||_mu^2.
// 1-homogeneous in mu, so nonpositivity on the pi-normalized simplex
// certifies it on the whole cone.
double hj_value(const Vec& phi_dot, const EdgeField& grad_phi, const Measure& mu,
                const MarkovChain& chain);

// sup of hj_value over the simplex {mu >= 0, <mu,1>_pi = 1}. Concave
// maximization by multi-restart projected gradient ascent; an optional
// warm start joins the deterministic starts.
double hj_surplus(const Vec& phi_dot, const EdgeField& grad_phi, const MarkovChain& chain,
                  const HjOptions& opts = {}, const Measure* warm = nullptr,
                  Measure* arg_max = nullptr);

// Fast sufficient feasibility check (arithmetic-mean bound): if
//   phi_dot(x) + (1/4b^2) sum_y grad_phi(x,y)^2 K(x,y) <= 0 for all x,
// the Hamilton-Jacobi inequality holds. One-sided; a failed check proves
// nothing.
bool hj_sufficient(const Vec& phi_dot, const EdgeField& grad_phi, const MarkovChain& chain);

// Max over intervals of the surplus, evaluating the gradient at both
// interval endpoints (the form is convex along each linear-in-time
// segment, so the endpoints dominate the interior).
double certificate_margin(const DualCertificate& cert, const MarkovChain& chain,
                          const HjOptions& opts = {});

// <phi_M, mu1>_pi - <phi_0, mu0>_pi - (1/2a^2) dt sum_k <phibar_k, p>_pi^2.
double dual_value(const DualCertificate& cert, const Measure& mu0, const Measure& mu1,
                  const MarkovChain& chain);

// Builds a certificate from a converged interior minimizer carrying
// potentials: midpoint values b^2 psi_k + c_k 1 with the constant fixed
// by <phi, p>_pi = a^2 h_k; infeasibility from discretization noise is
// repaired by subtracting the accumulated-surplus ramp (a space-constant,
// nondecreasing-in-time shift), with the scaling fallback phi <- (1-s)phi
// by bisection if a margin persists.
DualCertificate certificate_from_primal(const SolveReport& report, const MarkovChain& chain,
                                        const HjOptions& opts = {});

struct GapReport {
    double primal_half_sq = 0.0;  // (1/2) W^2
    double dual = 0.0;
    double rel_gap = 0.0;         // (primal - dual) / max(primal, eps)
    double feasibility_margin = 0.0;
    SolveReport primal;
    DualCertificate certificate;
};

// Runs the primal solver, constructs and repairs the certificate, and
// reports both sides at matching quadrature.
GapReport duality_gap(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                      const SolveOptions& solve_opts = {}, const HjOptions& hj_opts = {});

}  // namespace graphflow
