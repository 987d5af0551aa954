#include "graphflow/elliptic.hpp"

#include <Eigen/Cholesky>

namespace graphflow {

namespace {

constexpr double kSolveTol = 1e-10;

// Weighted graph Laplacian G = -diag(pi) A_mu, symmetric PSD with kernel
// span{1} on a connected chain with interior mu. Detailed balance makes
// the off-diagonal weights pi(x) K(x,y) theta(mu(x),mu(y)) symmetric; we
// symmetrize explicitly to scrub roundoff.
Mat weighted_laplacian(const Measure& mu, const MarkovChain& chain) {
    const int n = chain.n;
    Mat G = Mat::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x == y || !chain.has_edge(x, y)) continue;
            const double w = chain.pi(x) * chain.K(x, y) * log_mean(mu(x), mu(y));
            G(x, y) -= w;
            G(x, x) += w;
        }
    }
    G = 0.5 * (G + G.transpose()).eval();
    return G;
}

}  // namespace

Vec apply_A(const Measure& mu, const Vec& psi, const MarkovChain& chain) {
    const int n = chain.n;
    Vec out = Vec::Zero(n);
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int y = 0; y < n; ++y)
            if (chain.has_edge(x, y))
                acc += (psi(y) - psi(x)) * log_mean(mu(x), mu(y)) * chain.K(x, y);
        out(x) = acc;
    }
    return out;
}

Vec solve_weighted_poisson(const Measure& mu, const Vec& nu, const MarkovChain& chain) {
    if (!is_strictly_positive(mu))
        throw NotInterior("weighted Poisson solve requires strictly positive mu");
    const double proj = pair_node(nu, Vec::Ones(chain.n), chain);
    const double scale = std::max(1.0, nu.cwiseAbs().maxCoeff());
    if (std::abs(proj) > 1e-9 * scale)
        throw NotSolvable("right-hand side is not pi-orthogonal to constants");

    // G psi = -diag(pi) nu; the rank-one term pi pi^T pins <psi,1>_pi = 0
    // without perturbing the solution on the orthogonal complement.
    Mat G = weighted_laplacian(mu, chain);
    const double shift = G.diagonal().maxCoeff();
    Mat A = G + shift * chain.pi * chain.pi.transpose();
    Vec rhs = -(chain.pi.array() * nu.array()).matrix();

    Eigen::LDLT<Mat> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("LDLT factorization failed");
    Vec psi = ldlt.solve(rhs);

    // One step of iterative refinement; the systems are tiny and this
    // brings the residual to the 1e-12 relative level.
    psi += ldlt.solve(rhs - A * psi);

    const double res = (apply_A(mu, psi, chain) - nu).cwiseAbs().maxCoeff();
    if (res > 1e-8 * std::max(1.0, nu.cwiseAbs().maxCoeff()))
        throw SingularSystem("weighted Poisson residual " + std::to_string(res));
    return psi;
}

TangentSolve solve_tangent(const Measure& mu, const Vec& rho, const MarkovChain& chain) {
    if (!is_strictly_positive(mu)) throw NotInterior("solve_tangent requires strictly positive mu");
    TangentSolve out;
    out.h = pair_node(rho, Vec::Ones(chain.n), chain);
    const Vec nu = out.h * chain.p - rho;
    out.psi = solve_weighted_poisson(mu, nu, chain);
    out.grad_psi = gradient(out.psi, chain);
    out.residual = (rho + apply_A(mu, out.psi, chain) - out.h * chain.p).cwiseAbs().maxCoeff();
    if (out.residual > kSolveTol * std::max(1.0, rho.cwiseAbs().maxCoeff()))
        throw SingularSystem("tangent solve residual " + std::to_string(out.residual));
    return out;
}

TangentSolve project_flux(const Measure& mu, const EdgeField& V, const MarkovChain& chain) {
    if (!is_strictly_positive(mu)) throw NotInterior("project_flux requires strictly positive mu");
    TangentSolve out;
    const Vec divV = divergence(V, chain);
    out.psi = solve_weighted_poisson(mu, divV, chain);
    out.grad_psi = gradient(out.psi, chain);
    out.h = 0.0;
    out.residual = (apply_A(mu, out.psi, chain) - divV).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace graphflow
