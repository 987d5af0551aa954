#pragma once

#include "graphflow/calculus.hpp"

// Instantaneous continuity-equation solves: the weighted graph operator
// A_mu psi = div(mobility(mu) * grad psi), the tangent solver that maps a
// mass rate rho to the unique pair (grad psi, h), and the projection of a
// raw flux onto gradient form.

namespace graphflow {

// Result of a tangent or projection solve. psi is the gauge-fixed
// representative with <psi, 1>_pi = 0; grad_psi is its canonical
// gradient field; residual is the max-norm defect of the solved system.
struct TangentSolve {
    Vec psi;
    EdgeField grad_psi;
    double h = 0.0;
    double residual = 0.0;
};

// A_mu psi = div(mobility(mu) * grad psi). Annihilates constants and its
// output is pi-orthogonal to constants.
Vec apply_A(const Measure& mu, const Vec& psi, const MarkovChain& chain);

// Solves A_mu psi = nu for mu strictly positive, with gauge <psi,1>_pi = 0.
// Solvable iff <nu,1>_pi = 0 (throws NotSolvable otherwise); throws
// NotInterior on boundary mu and SingularSystem on numerical breakdown.
Vec solve_weighted_poisson(const Measure& mu, const Vec& nu, const MarkovChain& chain);

// Unique solution (grad psi, h) of   rho + A_mu psi = h p,
// for mu strictly positive. h = <rho,1>_pi exactly (pairing the equation
// with the constant 1 kills the divergence term).
TangentSolve solve_tangent(const Measure& mu, const Vec& rho, const MarkovChain& chain);

// Projects a flux V onto gradient form: returns psi with
//   div(mobility(mu) * grad psi) = div V,   <psi,1>_pi = 0,
// and the energy inequality edge_norm_sq(grad psi, mu) <= A'(mu, V).
TangentSolve project_flux(const Measure& mu, const EdgeField& V, const MarkovChain& chain);

}  // namespace graphflow
