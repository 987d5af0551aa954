#pragma once

#include "graphflow/chain.hpp"

// Discrete differential calculus on the chain: logarithmic mean and its
// partial derivative, gradient/divergence, pi-weighted pairings, the
// edge mobility, and the convex kinetic integrand alpha.

namespace graphflow {

// Real function on ordered state pairs. The canonical representative of
// the kernel-support equivalence class keeps exact zeros wherever
// K(x,y) = 0; every routine below emits canonical fields.
using EdgeField = Mat;

// Logarithmic mean
//   theta(u,v) = (u - v) / (log u - log v),  theta(u,u) = u,  theta(0,.) = 0.
// Near the diagonal the closed form is 0/0; for |u-v| <= 1e-9 max(u,v)
// we switch to the series (u+v)/2 (1 - d^2/12), d = 2(u-v)/(u+v).
double log_mean(double u, double v);

// d theta / du for u,v > 0. Closed form
//   [(log u - log v) - (u - v)/u] / (log u - log v)^2
// with the diagonal series 1/2 - d/6 + d^2/24 - d^3/45 below a relative
// difference of 1e-4, where the closed form starts losing digits.
double log_mean_d1(double u, double v);

// Kinetic integrand alpha(v,s,t) = v^2 / theta(s,t) with the conventions
// 0/0 = 0 and v^2/0 = +inf. Jointly convex and lower semicontinuous;
// +inf is returned as an IEEE infinity after an explicit zero test, so
// no overflow artifact can masquerade as a boundary hit.
double alpha(double v, double s, double t);

// (grad psi)(x,y) = psi(y) - psi(x), canonicalized to the kernel support.
EdgeField gradient(const Vec& psi, const MarkovChain& chain);

// (div Psi)(x) = 1/2 sum_y (Psi(x,y) - Psi(y,x)) K(x,y).
// Mass conservation <div Psi, 1>_pi = 0 holds identically.
Vec divergence(const EdgeField& Psi, const MarkovChain& chain);

// pi-weighted pairings. Integration by parts:
//   <grad psi, Psi>_pi = -<psi, div Psi>_pi.
double pair_node(const Vec& f, const Vec& g, const MarkovChain& chain);
double pair_edge(const EdgeField& F, const EdgeField& G, const MarkovChain& chain);

// Edgewise logarithmic mean of node masses; weights the kinetic term.
struct Mobility {
    Mat values;  // values(x,y) = theta(mu(x), mu(y)); symmetric
};
Mobility mobility(const Measure& mu);

// ||Psi||_mu^2 = 1/2 sum_{x,y} Psi(x,y)^2 theta(mu(x),mu(y)) K(x,y) pi(x).
double edge_norm_sq(const EdgeField& Psi, const Measure& mu, const MarkovChain& chain);

// Zeroes every entry off the kernel support.
EdgeField canonicalize(const EdgeField& Psi, const MarkovChain& chain);

// (Psi(x,y) - Psi(y,x)) / 2 — divergence-preserving antisymmetric part.
EdgeField antisymmetric_part(const EdgeField& Psi);

}  // namespace graphflow
