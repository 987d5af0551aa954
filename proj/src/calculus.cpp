#include "graphflow/calculus.hpp"

#include <cmath>
#include <limits>

namespace graphflow {

double log_mean(double u, double v) {
    if (u < 0.0 || v < 0.0) throw DomainError("log_mean requires nonnegative arguments");
    if (u == 0.0 || v == 0.0) return 0.0;
    const double hi = std::max(u, v);
    if (std::abs(u - v) <= 1e-9 * hi) {
        const double m = 0.5 * (u + v);
        const double d = (u - v) / m;
        return m * (1.0 - d * d / 12.0);
    }
    // log u - log v via log1p keeps full relative accuracy when u ~ v.
    const double r = (u - v) / v;
    const double L = std::abs(r) < 0.5 ? std::log1p(r) : std::log(u) - std::log(v);
    return (u - v) / L;
}

double log_mean_d1(double u, double v) {
    if (!(u > 0.0) || !(v > 0.0)) throw DomainError("log_mean_d1 requires positive arguments");
    const double hi = std::max(u, v);
    if (std::abs(u - v) <= 1e-4 * hi) {
        const double d = 2.0 * (u - v) / (u + v);
        return 0.5 - d / 6.0 + d * d / 24.0 - d * d * d / 45.0;
    }
    const double r = (u - v) / v;
    const double L = std::abs(r) < 0.5 ? std::log1p(r) : std::log(u) - std::log(v);
    return (L - (u - v) / u) / (L * L);
}

double alpha(double v, double s, double t) {
    if (s < 0.0 || t < 0.0) throw DomainError("alpha requires nonnegative masses");
    const double th = log_mean(s, t);
    if (th == 0.0) return v == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return v * v / th;
}

EdgeField gradient(const Vec& psi, const MarkovChain& chain) {
    const int n = chain.n;
    EdgeField g = EdgeField::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (chain.has_edge(x, y)) g(x, y) = psi(y) - psi(x);
    return g;
}

Vec divergence(const EdgeField& Psi, const MarkovChain& chain) {
    const int n = chain.n;
    Vec d = Vec::Zero(n);
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int y = 0; y < n; ++y)
            if (chain.has_edge(x, y)) acc += (Psi(x, y) - Psi(y, x)) * chain.K(x, y);
        d(x) = 0.5 * acc;
    }
    return d;
}

double pair_node(const Vec& f, const Vec& g, const MarkovChain& chain) {
    return (f.array() * g.array() * chain.pi.array()).sum();
}

double pair_edge(const EdgeField& F, const EdgeField& G, const MarkovChain& chain) {
    const int n = chain.n;
    double acc = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (chain.has_edge(x, y)) acc += F(x, y) * G(x, y) * chain.K(x, y) * chain.pi(x);
    return 0.5 * acc;
}

Mobility mobility(const Measure& mu) {
    const int n = static_cast<int>(mu.size());
    Mobility m;
    m.values.resize(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) m.values(x, y) = log_mean(mu(x), mu(y));
    return m;
}

double edge_norm_sq(const EdgeField& Psi, const Measure& mu, const MarkovChain& chain) {
    const int n = chain.n;
    double acc = 0.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (chain.has_edge(x, y))
                acc += Psi(x, y) * Psi(x, y) * log_mean(mu(x), mu(y)) * chain.K(x, y) * chain.pi(x);
    return 0.5 * acc;
}

EdgeField canonicalize(const EdgeField& Psi, const MarkovChain& chain) {
    EdgeField out = Psi;
    for (int x = 0; x < chain.n; ++x)
        for (int y = 0; y < chain.n; ++y)
            if (!chain.has_edge(x, y)) out(x, y) = 0.0;
    return out;
}

EdgeField antisymmetric_part(const EdgeField& Psi) { return 0.5 * (Psi - Psi.transpose()); }

}  // namespace graphflow
