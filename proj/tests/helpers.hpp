#pragma once

// Shared test oracles. These deliberately avoid the implementation paths
// they check: the logarithmic mean is integrated by quadrature, its
// derivative taken by central differences, and the transport rate summed
// from first principles.

#include <cmath>
#include <random>

#include "graphflow/suite.hpp"
#include "graphflow/transport.hpp"

namespace testing_oracles {

using namespace graphflow;

// Composite-Simpson quadrature of int_0^1 u^xi v^(1-xi) dxi.
inline double log_mean_quadrature(double u, double v, int panels = 2000) {
    if (u == 0.0 || v == 0.0) return 0.0;
    auto f = [&](double xi) { return std::pow(u, xi) * std::pow(v, 1.0 - xi); };
    const double h = 1.0 / panels;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

inline double log_mean_fd(double u, double v, double eps = 1e-6) {
    return (log_mean(u + eps, v) - log_mean(u - eps, v)) / (2.0 * eps);
}

// Brute-force transport rate: sum alpha over every ordered kernel pair.
inline double transport_rate_bruteforce(const Measure& mu, const EdgeField& V,
                                        const MarkovChain& chain) {
    double acc = 0.0;
    for (int x = 0; x < chain.n; ++x)
        for (int y = 0; y < chain.n; ++y)
            if (chain.has_edge(x, y))
                acc += alpha(V(x, y), mu(x), mu(y)) * chain.K(x, y) * chain.pi(x);
    return 0.5 * acc;
}

inline EdgeField random_canonical_field(const MarkovChain& chain, std::mt19937_64& rng,
                                        double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    EdgeField F = EdgeField::Zero(chain.n, chain.n);
    for (int x = 0; x < chain.n; ++x)
        for (int y = 0; y < chain.n; ++y)
            if (x != y && chain.has_edge(x, y)) F(x, y) = uni(rng);
    return F;
}

inline Vec random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = uni(rng);
    return v;
}

// Valid random trajectory by forward integration with rescaling.
inline Trajectory random_valid_trajectory(const MarkovChain& chain, std::mt19937_64& rng,
                                          int N = 8) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Trajectory traj;
    traj.V.assign(N, EdgeField::Zero(chain.n, chain.n));
    traj.h.resize(N);
    Vec mu0(chain.n);
    for (int x = 0; x < chain.n; ++x) mu0(x) = 0.5 + 0.5 * std::abs(uni(rng));
    for (int k = 0; k < N; ++k) {
        traj.h(k) = 0.3 * uni(rng);
        traj.V[k] = random_canonical_field(chain, rng, 0.2);
    }
    traj.mu.resize(N + 1);
    for (int attempt = 0; attempt < 30; ++attempt) {
        traj.mu[0] = mu0;
        bool ok = true;
        for (int k = 0; k < N; ++k) {
            traj.mu[k + 1] =
                traj.mu[k] + (traj.h(k) * chain.p - divergence(traj.V[k], chain)) / double(N);
            if (traj.mu[k + 1].minCoeff() < 0.0) ok = false;
        }
        if (ok) return traj;
        for (auto& V : traj.V) V *= 0.5;
        traj.h *= 0.5;
    }
    traj.h.setZero();
    for (auto& V : traj.V) V.setZero();
    traj.mu.assign(N + 1, mu0);
    return traj;
}

}  // namespace testing_oracles
