#include "graphflow/transport.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <random>

namespace graphflow {

namespace {

constexpr double kNegPenalty = 1e10;  // quadratic hinge on negative node mass
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Compact L-BFGS with Armijo backtracking. The objectives below are smooth
// and convex on their domain and return +inf outside it, which the line
// search treats as an ordinary rejection.
// ---------------------------------------------------------------------------

struct LbfgsOutcome {
    double f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
};

template <typename FG>
LbfgsOutcome lbfgs_minimize(FG&& fg, Vec& w, double grad_tol, int max_iters) {
    constexpr int kMemory = 10;
    constexpr double kArmijo = 1e-4;
    const int dim = static_cast<int>(w.size());

    std::vector<Vec> S, Y;
    std::vector<double> rho;
    Vec g(dim), g_new(dim), d(dim), w_new(dim);
    double f = fg(w, g);
    if (!std::isfinite(f)) throw NotConverged("optimizer started outside the feasible domain");

    LbfgsOutcome out;
    int it = 0;
    for (; it < max_iters; ++it) {
        const double gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm <= grad_tol) break;

        // Two-loop recursion.
        d = -g;
        const int m = static_cast<int>(S.size());
        std::vector<double> a(m);
        for (int i = m - 1; i >= 0; --i) {
            a[i] = rho[i] * S[i].dot(d);
            d -= a[i] * Y[i];
        }
        if (m > 0) d *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        for (int i = 0; i < m; ++i) {
            const double beta = rho[i] * Y[i].dot(d);
            d += (a[i] - beta) * S[i];
        }

        double slope = g.dot(d);
        if (!(slope < 0.0)) {  // stale curvature; restart from steepest descent
            S.clear();
            Y.clear();
            rho.clear();
            d = -g;
            slope = g.dot(d);
        }

        double step = 1.0;
        double f_new = kInf;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            w_new = w + step * d;
            f_new = fg(w_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: gradient noise floor reached

        const Vec s = w_new - w;
        const Vec y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            S.push_back(s);
            Y.push_back(y);
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > kMemory) {
                S.erase(S.begin());
                Y.erase(Y.begin());
                rho.erase(rho.begin());
            }
        }
        w = w_new;
        f = f_new;
        g = g_new;
    }
    out.f = f;
    out.grad_norm = g.cwiseAbs().maxCoeff();
    out.iterations = it;
    return out;
}

// ---------------------------------------------------------------------------
// Discrete action minimization in reduced coordinates.
//
// Unknowns: antisymmetric interval fluxes in undirected-edge coordinates
// plus interval sources (sources absent in the conservative problem).
// Interior measures are eliminated by forward integration from mu0, which
// keeps every iterate feasible for the continuity equation; the fixed
// terminal state is an affine constraint handled exactly by restricting
// the search to its null space.
// ---------------------------------------------------------------------------

struct UndirectedEdge {
    int x, y;        // x < y, K(x,y) > 0
    double weight;   // K(x,y) pi(x) == K(y,x) pi(y)
};

class ActionSolver {
public:
    ActionSolver(const MarkovChain& chain, int N, bool conservative)
        : chain_(chain), N_(N), conservative_(conservative), dt_(1.0 / N) {
        for (int x = 0; x < chain.n; ++x)
            for (int y = x + 1; y < chain.n; ++y)
                if (chain.has_edge(x, y))
                    edges_.push_back({x, y, chain.K(x, y) * chain.pi(x)});
        E_ = static_cast<int>(edges_.size());
        dim_ = N_ * E_ + (conservative_ ? 0 : N_);

        div_op_ = Mat::Zero(chain.n, E_);
        for (int e = 0; e < E_; ++e) {
            div_op_(edges_[e].x, e) = chain.K(edges_[e].x, edges_[e].y);
            div_op_(edges_[e].y, e) = -chain.K(edges_[e].y, edges_[e].x);
        }

        // Terminal constraint sum_k (h_k p - div V_k) = N (mu1 - mu0).
        Mat A = Mat::Zero(chain.n, dim_);
        for (int k = 0; k < N_; ++k) {
            A.block(0, k * E_, chain.n, E_) = -div_op_;
            if (!conservative_) A.col(N_ * E_ + k) = chain.p;
        }
        cod_.compute(A);
        Eigen::ColPivHouseholderQR<Mat> qr(A.transpose());
        const int rank = static_cast<int>(qr.rank());
        Mat Q = qr.householderQ();
        null_basis_ = Q.rightCols(dim_ - rank);
        A_ = std::move(A);
    }

    int free_dim() const { return static_cast<int>(null_basis_.cols()); }
    const Vec& last_reduced() const { return warm_; }

    SolveReport solve(const Measure& mu0, const Measure& mu1, const SolveOptions& opts,
                      const Vec* warm = nullptr) {
        mu0_ = mu0;
        mu1_ = mu1;
        const Vec r = static_cast<double>(N_) * (mu1 - mu0);
        particular_ = cod_.solve(r);
        if ((A_ * particular_ - r).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, r.cwiseAbs().maxCoeff()))
            throw MassMismatch("terminal constraint is not reachable for this problem");

        Vec w;
        bool warm_ok = false;
        if (warm && warm->size() == free_dim()) {
            w = *warm;
            Vec g_dummy(free_dim());
            delta_ = opts.delta_schedule.back();
            warm_ok = std::isfinite(objective(w, g_dummy, false));
        }
        if (!warm_ok) w = null_basis_.transpose() * (seed_state() - particular_);
        if (opts.randomize_init) {
            std::mt19937_64 rng(opts.seed);
            std::normal_distribution<double> noise(0.0, 1.0);
            Vec bump(free_dim());
            for (int i = 0; i < free_dim(); ++i) bump(i) = noise(rng);
            double scale = opts.init_noise * std::max(1.0, w.norm() / std::sqrt(double(free_dim())));
            Vec g_dummy(free_dim());
            for (int tries = 0; tries < 12; ++tries) {
                delta_ = opts.delta_schedule.front();
                if (std::isfinite(objective(w + scale * bump, g_dummy, false))) {
                    w += scale * bump;
                    break;
                }
                scale *= 0.5;
            }
        }

        SolveReport report;
        // The problem is convex, so a warm start from a neighboring solve
        // can skip straight to the final smoothing level; continuation is
        // only there to condition cold starts.
        std::vector<double> schedule = opts.delta_schedule;
        if (warm_ok && !schedule.empty()) schedule.assign(1, schedule.back());
        const int stages = static_cast<int>(schedule.size());
        const int per_stage = std::max(200, opts.max_iterations / std::max(1, stages));
        double residual = kInf;
        for (int s = 0; s < stages; ++s) {
            delta_ = schedule[s];
            const bool last = (s == stages - 1);
            const double tol = last ? 0.5 * opts.opt_tol : 3e-6;
            auto outcome = lbfgs_minimize(
                [this](const Vec& ww, Vec& grad) { return objective(ww, grad, true); }, w, tol,
                per_stage);
            report.iterations += outcome.iterations;
            residual = outcome.grad_norm;
        }
        warm_ = w;

        if (residual > 10.0 * opts.opt_tol)
            throw NotConverged("optimality residual " + std::to_string(residual) +
                               " after iteration budget");
        report.converged = residual <= opts.opt_tol;
        report.opt_residual = residual;

        finalize(w, report);
        return report;
    }

private:
    // Unpacks reduced coordinates, integrates the measures forward and
    // accumulates the smoothed action and its gradient. Out-of-domain
    // points (mass at or below -0.9 delta) evaluate to +inf.
    double objective(const Vec& w, Vec& grad_w, bool want_grad) {
        const int n = chain_.n;
        const Vec z = particular_ + null_basis_ * w;
        const double a2 = chain_.a * chain_.a, b2 = chain_.b * chain_.b;

        mu_path_.resize(N_ + 1);
        mu_path_[0] = mu0_;
        for (int k = 0; k < N_; ++k) {
            Vec rate = -div_op_ * z.segment(k * E_, E_);
            if (!conservative_) rate += z(N_ * E_ + k) * chain_.p;
            mu_path_[k + 1] = mu_path_[k] + dt_ * rate;
            for (int x = 0; x < n; ++x)
                if (mu_path_[k + 1](x) <= -0.9 * delta_) return kInf;
        }

        double f = 0.0;
        gmu_.assign(N_ + 1, Vec::Zero(n));
        for (int k = 0; k < N_; ++k) {
            if (!conservative_) {
                const double h = z(N_ * E_ + k);
                f += dt_ * a2 * h * h;
            }
            for (int e = 0; e < E_; ++e) {
                const double v = z(k * E_ + e);
                const double sx = 0.5 * (mu_path_[k](edges_[e].x) + mu_path_[k + 1](edges_[e].x));
                const double sy = 0.5 * (mu_path_[k](edges_[e].y) + mu_path_[k + 1](edges_[e].y));
                const double th = log_mean(sx + delta_, sy + delta_);
                f += dt_ * b2 * v * v * edges_[e].weight / th;
                if (want_grad && v != 0.0) {
                    const double c = -0.5 * dt_ * b2 * v * v * edges_[e].weight / (th * th);
                    const double dx = c * log_mean_d1(sx + delta_, sy + delta_);
                    const double dy = c * log_mean_d1(sy + delta_, sx + delta_);
                    gmu_[k](edges_[e].x) += dx;
                    gmu_[k + 1](edges_[e].x) += dx;
                    gmu_[k](edges_[e].y) += dy;
                    gmu_[k + 1](edges_[e].y) += dy;
                }
            }
        }
        for (int k = 1; k < N_; ++k) {
            for (int x = 0; x < n; ++x) {
                const double neg = -mu_path_[k](x);
                if (neg > 0.0) {
                    f += kNegPenalty * chain_.pi(x) * neg * neg;
                    if (want_grad) gmu_[k](x) -= 2.0 * kNegPenalty * chain_.pi(x) * neg;
                }
            }
        }
        if (!want_grad) return f;

        // Suffix sums push the measure adjoints back onto (V, h).
        Vec grad_z = Vec::Zero(dim_);
        Vec suffix = Vec::Zero(n);
        for (int k = N_ - 1; k >= 0; --k) {
            suffix += gmu_[k + 1];
            grad_z.segment(k * E_, E_) -= dt_ * (div_op_.transpose() * suffix);
            if (!conservative_) grad_z(N_ * E_ + k) = dt_ * chain_.p.dot(suffix);
        }
        for (int k = 0; k < N_; ++k) {
            for (int e = 0; e < E_; ++e) {
                const double v = z(k * E_ + e);
                const double sx = 0.5 * (mu_path_[k](edges_[e].x) + mu_path_[k + 1](edges_[e].x));
                const double sy = 0.5 * (mu_path_[k](edges_[e].y) + mu_path_[k + 1](edges_[e].y));
                grad_z(k * E_ + e) +=
                    2.0 * dt_ * b2 * v * edges_[e].weight / log_mean(sx + delta_, sy + delta_);
            }
            if (!conservative_)
                grad_z(N_ * E_ + k) += 2.0 * dt_ * a2 * z(N_ * E_ + k);
        }
        grad_w.noalias() = null_basis_.transpose() * grad_z;
        return f;
    }

    // Feasible finite-action seed: per-interval tangent solves along the
    // linear interpolation, or along a two-segment detour through an
    // interior waypoint when the linear path pins some state at zero.
    Vec seed_state() {
        const int n = chain_.n;
        bool linear_ok = true;
        for (int x = 0; x < n; ++x)
            if (std::max(mu0_(x), mu1_(x)) <= 1e-14) linear_ok = false;

        std::vector<Measure> nodes(N_ + 1);
        if (linear_ok) {
            for (int k = 0; k <= N_; ++k) {
                const double t = double(k) / N_;
                nodes[k] = (1.0 - t) * mu0_ + t * mu1_;
            }
        } else {
            const double m0 = total_mass(mu0_, chain_);
            const double m1 = total_mass(mu1_, chain_);
            Measure waypoint = 0.5 * (mu0_ + mu1_) + 0.5 * std::max({m0, m1, 0.1}) * Vec::Ones(n);
            // The conservative problem stores no sources, so the detour
            // must preserve total mass exactly.
            if (conservative_) waypoint *= m0 / total_mass(waypoint, chain_);
            for (int k = 0; k <= N_; ++k) {
                const double t = double(k) / N_;
                nodes[k] = t <= 0.5 ? ((1.0 - 2.0 * t) * mu0_ + 2.0 * t * waypoint).eval()
                                    : ((2.0 - 2.0 * t) * waypoint + (2.0 * t - 1.0) * mu1_).eval();
            }
        }

        Vec z = Vec::Zero(dim_);
        for (int k = 0; k < N_; ++k) {
            const Vec rho = (nodes[k + 1] - nodes[k]) * double(N_);
            const Measure mid = 0.5 * (nodes[k] + nodes[k + 1]);
            if (rho.cwiseAbs().maxCoeff() < 1e-15) continue;
            const TangentSolve ts = solve_tangent(mid, rho, chain_);
            for (int e = 0; e < E_; ++e) {
                const double th = log_mean(mid(edges_[e].x), mid(edges_[e].y));
                z(k * E_ + e) = th * ts.grad_psi(edges_[e].x, edges_[e].y);
            }
            if (!conservative_) z(N_ * E_ + k) = ts.h;
        }
        return z;
    }

    // Exact-mobility evaluation of the converged point, potential
    // recovery, and report assembly.
    void finalize(const Vec& w, SolveReport& report) {
        const int n = chain_.n;
        const Vec z = particular_ + null_basis_ * w;

        Trajectory traj;
        traj.mu.resize(N_ + 1);
        traj.mu[0] = mu0_;
        traj.V.assign(N_, EdgeField::Zero(n, n));
        traj.h = Vec::Zero(N_);
        for (int k = 0; k < N_; ++k) {
            for (int e = 0; e < E_; ++e) {
                traj.V[k](edges_[e].x, edges_[e].y) = z(k * E_ + e);
                traj.V[k](edges_[e].y, edges_[e].x) = -z(k * E_ + e);
            }
            if (!conservative_) traj.h(k) = z(N_ * E_ + k);
            Vec rate = traj.h(k) * chain_.p - divergence(traj.V[k], chain_);
            traj.mu[k + 1] = traj.mu[k] + dt_ * rate;
            for (int x = 0; x < n; ++x)
                if (traj.mu[k + 1](x) < 0.0 && traj.mu[k + 1](x) > -1e-12) traj.mu[k + 1](x) = 0.0;
        }

        // Project each flux onto gradient form when the midpoints allow:
        // divergences are preserved, the action can only decrease, and the
        // trajectory then carries exactly consistent potentials.
        bool interior = true;
        for (int k = 0; k < N_ && interior; ++k)
            interior = is_strictly_positive(traj.midpoint(k));
        if (interior) {
            std::vector<Vec> psis(N_);
            for (int k = 0; k < N_; ++k) {
                const Measure mid = traj.midpoint(k);
                const TangentSolve ts = project_flux(mid, traj.V[k], chain_);
                psis[k] = ts.psi;
                for (int e = 0; e < E_; ++e) {
                    const double th = log_mean(mid(edges_[e].x), mid(edges_[e].y));
                    const double v = th * ts.grad_psi(edges_[e].x, edges_[e].y);
                    traj.V[k](edges_[e].x, edges_[e].y) = v;
                    traj.V[k](edges_[e].y, edges_[e].x) = -v;
                }
            }
            traj.psi = std::move(psis);
        }

        report.trajectory = std::move(traj);
        report.value = action_quad(report.trajectory, chain_, kCeTolSolver);
        if (!std::isfinite(report.value))
            throw NotConverged("minimizer touches the boundary with active flux");
        report.distance = std::sqrt(std::max(0.0, report.value));

        const Vec speeds = speed_profile(report.trajectory, chain_);
        const double smax = speeds.maxCoeff(), smin = speeds.minCoeff();
        report.speed_variation = smax <= 1e-12 ? 0.0 : smax / std::max(smin, 1e-300) - 1.0;

        double mmin = kInf;
        for (int k = 1; k < N_; ++k) mmin = std::min(mmin, report.trajectory.mu[k].minCoeff());
        report.min_interior_mass = N_ > 1 ? mmin : 0.0;
    }

    const MarkovChain& chain_;
    int N_;
    bool conservative_;
    double dt_;
    std::vector<UndirectedEdge> edges_;
    int E_ = 0;
    int dim_ = 0;
    Mat div_op_;
    Mat A_;
    Mat null_basis_;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod_;
    Measure mu0_, mu1_;
    Vec particular_;
    Vec warm_;
    double delta_ = 1e-2;

    // scratch
    std::vector<Vec> mu_path_;
    std::vector<Vec> gmu_;
};

SolveReport trivial_report(const Measure& mu0, int N, const MarkovChain& chain) {
    SolveReport report;
    report.trajectory = Trajectory::constant(mu0, N, chain);
    report.trajectory.psi = std::vector<Vec>(N, Vec::Zero(chain.n));
    report.converged = true;
    double mmin = kInf;
    for (int k = 1; k < N; ++k) mmin = std::min(mmin, mu0.minCoeff());
    report.min_interior_mass = N > 1 ? mmin : 0.0;
    return report;
}

void check_endpoints(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N) {
    if (mu0.size() != chain.n || mu1.size() != chain.n)
        throw SchemaError("endpoint measure length mismatch");
    if (!is_nonnegative(mu0) || !is_nonnegative(mu1))
        throw SchemaError("endpoint measures must be nonnegative");
    if (N < 2) throw SchemaError("need at least 2 time intervals");
}

}  // namespace

SolveReport distance_W(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                       const SolveOptions& opts) {
    check_endpoints(mu0, mu1, chain, N);
    if ((mu0 - mu1).cwiseAbs().maxCoeff() == 0.0) return trivial_report(mu0, N, chain);
    ActionSolver solver(chain, N, /*conservative=*/false);
    return solver.solve(mu0, mu1, opts);
}

SolveReport distance_ME(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                        const SolveOptions& opts) {
    check_endpoints(mu0, mu1, chain, N);
    if (std::abs(total_mass(mu0, chain) - total_mass(mu1, chain)) > 1e-10)
        throw MassMismatch("conservative distance needs equal total masses");
    if ((mu0 - mu1).cwiseAbs().maxCoeff() == 0.0) return trivial_report(mu0, N, chain);
    ActionSolver solver(chain, N, /*conservative=*/true);
    return solver.solve(mu0, mu1, opts);
}

SolveReport distance_D(const Measure& mu0, const Measure& mu1, const MarkovChain& chain, int N,
                       const SolveOptions& opts) {
    check_endpoints(mu0, mu1, chain, N);
    const double a2 = chain.a * chain.a;
    const double m0 = total_mass(mu0, chain), m1 = total_mass(mu1, chain);

    // Feasible interval for H0: both shifted measures stay nonnegative.
    const double drop0 = (mu0.array() / chain.p.array()).minCoeff();
    const double drop1 = (mu1.array() / chain.p.array()).minCoeff();
    const double lo = std::max(-drop0, (m1 - m0) - drop1);
    const double hi = std::max({lo, 0.0, m1 - m0}) + drop0 + drop1 + std::abs(m1 - m0) + 1.0;

    ActionSolver me_solver(chain, N, /*conservative=*/true);
    int total_iters = 0;
    bool all_converged = true;
    double worst_residual = 0.0;
    Vec warm;

    SolveReport best_leg;
    double best_H0 = lo, best_F = kInf;
    auto evaluate = [&](double H0) {
        const double H1 = H0 + m0 - m1;
        const Measure nu0 = (mu0 + H0 * chain.p).cwiseMax(0.0);
        const Measure nu1 = (mu1 + H1 * chain.p).cwiseMax(0.0);
        const double shift_cost2 = a2 * (std::abs(H0) + std::abs(H1)) * (std::abs(H0) + std::abs(H1));
        SolveReport leg;
        if ((nu0 - nu1).cwiseAbs().maxCoeff() == 0.0) {
            leg = trivial_report(nu0, N, chain);
        } else {
            try {
                leg = me_solver.solve(nu0, nu1, opts, warm.size() ? &warm : nullptr);
            } catch (const NotConverged&) {
                all_converged = false;
                return kInf;  // drop this scan point, keep searching
            }
            warm = me_solver.last_reduced();
        }
        total_iters += leg.iterations;
        all_converged = all_converged && leg.converged;
        worst_residual = std::max(worst_residual, leg.opt_residual);
        // leg.value is the conservative action at its own optimum, where
        // Quad = LinSq, so it already equals b^2 (int sqrt(A'))^2.
        const double F = shift_cost2 + leg.value;
        if (F < best_F) {
            best_F = F;
            best_H0 = H0;
            best_leg = leg;
        }
        return F;
    };

    // Coarse scan guards against non-unimodal profiles, then golden section.
    constexpr int kScan = 17;
    double scan_best = lo;
    double scan_val = kInf;
    for (int i = 0; i < kScan; ++i) {
        const double H0 = lo + (hi - lo) * i / (kScan - 1);
        const double F = evaluate(H0);
        if (F < scan_val) {
            scan_val = F;
            scan_best = H0;
        }
    }
    const double span = (hi - lo) / (kScan - 1);
    double gl = std::max(lo, scan_best - span), gr = std::min(hi, scan_best + span);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = gr - phi * (gr - gl), x2 = gl + phi * (gr - gl);
    double f1 = evaluate(x1), f2 = evaluate(x2);
    for (int i = 0; i < 40; ++i) {
        if (f1 <= f2) {
            gr = x2;
            x2 = x1;
            f2 = f1;
            x1 = gr - phi * (gr - gl);
            f1 = evaluate(x1);
        } else {
            gl = x1;
            x1 = x2;
            f1 = f2;
            x2 = gl + phi * (gr - gl);
            f2 = evaluate(x2);
        }
    }

    if (!std::isfinite(best_F)) throw NotConverged("no feasible shift produced a converged leg");
    const double H0 = best_H0, H1 = best_H0 + m0 - m1;

    // Report trajectory: shift, conservative leg, shift, each compressed
    // into a third of the unit interval (fluxes and sources pick up the
    // factor 3 from the time rescale).
    SolveReport report;
    const int Nleg = best_leg.trajectory.intervals();
    Trajectory traj;
    traj.mu.resize(3 * Nleg + 1);
    traj.V.assign(3 * Nleg, EdgeField::Zero(chain.n, chain.n));
    traj.h = Vec::Zero(3 * Nleg);
    const Measure nu0 = (mu0 + H0 * chain.p).cwiseMax(0.0);
    for (int k = 0; k <= Nleg; ++k) {
        const double t = double(k) / Nleg;
        traj.mu[k] = mu0 + t * H0 * chain.p;
        traj.mu[Nleg + k] = best_leg.trajectory.mu[k];
        traj.mu[2 * Nleg + k] = mu1 + (1.0 - t) * H1 * chain.p;
    }
    traj.mu[Nleg] = nu0;  // phase seam; identical up to roundoff
    for (int k = 0; k < Nleg; ++k) {
        traj.h(k) = 3.0 * H0;
        traj.V[Nleg + k] = 3.0 * best_leg.trajectory.V[k];
        traj.h(2 * Nleg + k) = -3.0 * H1;
    }

    report.value = best_F;
    report.distance = std::sqrt(std::max(0.0, best_F));
    report.trajectory = std::move(traj);
    report.iterations = total_iters;
    report.converged = all_converged;
    report.opt_residual = worst_residual;
    report.has_shift = true;
    report.shift_h0 = H0;
    report.shift_h1 = H1;
    const Vec speeds = speed_profile(report.trajectory, chain);
    const double smax = speeds.maxCoeff();
    report.speed_variation = smax <= 1e-12 ? 0.0 : smax / std::max(speeds.minCoeff(), 1e-300) - 1.0;
    double mmin = kInf;
    for (size_t k = 1; k + 1 < report.trajectory.mu.size(); ++k)
        mmin = std::min(mmin, report.trajectory.mu[k].minCoeff());
    report.min_interior_mass = mmin;
    return report;
}

NonlocalityDiagnostic check_nonlocality(const SolveReport& report) {
    NonlocalityDiagnostic diag;
    const auto& traj = report.trajectory;
    const int N = traj.intervals();
    diag.vacuous = (traj.mu.front() - traj.mu.back()).cwiseAbs().maxCoeff() == 0.0;
    double mmin = kInf, hmin = kInf;
    for (int k = 1; k < N; ++k) mmin = std::min(mmin, traj.mu[k].minCoeff());
    for (int k = 0; k < N; ++k) hmin = std::min(hmin, std::abs(traj.h(k)));
    diag.min_interior_mass = N > 1 ? mmin : 0.0;
    diag.min_abs_source = hmin;
    return diag;
}

}  // namespace graphflow
