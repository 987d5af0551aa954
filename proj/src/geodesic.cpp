#include "graphflow/geodesic.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <random>

namespace graphflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EdgeList {
    std::vector<std::pair<int, int>> edges;  // x < y, K(x,y) > 0
    explicit EdgeList(const MarkovChain& chain) {
        for (int x = 0; x < chain.n; ++x)
            for (int y = x + 1; y < chain.n; ++y)
                if (chain.has_edge(x, y)) edges.emplace_back(x, y);
    }
    int size() const { return static_cast<int>(edges.size()); }
};

EdgeField unpack_field(const Vec& coords, const EdgeList& el, int n) {
    EdgeField F = EdgeField::Zero(n, n);
    for (int e = 0; e < el.size(); ++e) {
        F(el.edges[e].first, el.edges[e].second) = coords(e);
        F(el.edges[e].second, el.edges[e].first) = -coords(e);
    }
    return F;
}

Vec pack_state(const GeodesicState& s, const EdgeList& el) {
    const int n = static_cast<int>(s.mu.size());
    Vec y(n + 1 + el.size());
    y.head(n) = s.mu;
    y(n) = s.h;
    for (int e = 0; e < el.size(); ++e) y(n + 1 + e) = s.grad_psi(el.edges[e].first, el.edges[e].second);
    return y;
}

GeodesicState unpack_state(const Vec& y, const EdgeList& el, int n) {
    GeodesicState s;
    s.mu = y.head(n);
    s.h = y(n);
    s.grad_psi = unpack_field(y.tail(el.size()), el, n);
    return s;
}

double state_speed(const GeodesicState& s, const MarkovChain& chain) {
    return chain.a * chain.a * s.h * s.h +
           chain.b * chain.b * edge_norm_sq(s.grad_psi, s.mu, chain);
}

// Packed-vector right-hand side; throws BoundaryContact off the interior.
Vec rhs_packed(const Vec& y, const EdgeList& el, const MarkovChain& chain) {
    GeodesicState s = unpack_state(y, el, chain.n);
    GeodesicDerivative d = geodesic_rhs(s, chain);
    Vec out(y.size());
    out.head(chain.n) = d.mu_dot;
    out(chain.n) = d.h_dot;
    for (int e = 0; e < el.size(); ++e)
        out(chain.n + 1 + e) = d.grad_psi_dot(el.edges[e].first, el.edges[e].second);
    return out;
}

Vec rk4_step(const Vec& y, double dt, const EdgeList& el, const MarkovChain& chain) {
    const Vec k1 = rhs_packed(y, el, chain);
    const Vec k2 = rhs_packed(y + 0.5 * dt * k1, el, chain);
    const Vec k3 = rhs_packed(y + 0.5 * dt * k2, el, chain);
    const Vec k4 = rhs_packed(y + dt * k3, el, chain);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::reached_Tmax: return "reached_Tmax";
        case StopReason::boundary_touch: return "boundary_touch";
        case StopReason::step_underflow: return "step_underflow";
    }
    return "unknown";
}

GeodesicDerivative geodesic_rhs(const GeodesicState& state, const MarkovChain& chain) {
    const int n = chain.n;
    if (!(state.mu.array() > 0.0).all())
        throw BoundaryContact("geodesic state has nonpositive mass");

    GeodesicDerivative d;
    d.mu_dot = Vec::Zero(n);
    for (int x = 0; x < n; ++x) {
        double flux = 0.0;
        for (int w = 0; w < n; ++w)
            if (chain.has_edge(x, w))
                flux += state.grad_psi(x, w) * log_mean(state.mu(x), state.mu(w)) * chain.K(x, w);
        d.mu_dot(x) = state.h * chain.p(x) - flux;
    }

    // Per-node kinetic density; its gradient is the edge-momentum drift
    // and its p-weighted total the source-momentum drift.
    Vec kinetic = Vec::Zero(n);
    for (int x = 0; x < n; ++x)
        for (int z = 0; z < n; ++z)
            if (chain.has_edge(x, z))
                kinetic(x) += 0.5 * state.grad_psi(z, x) * state.grad_psi(z, x) * chain.K(x, z) *
                              log_mean_d1(state.mu(x), state.mu(z));

    const double ratio = chain.b * chain.b / (2.0 * chain.a * chain.a);
    d.h_dot = 0.0;
    for (int x = 0; x < n; ++x) d.h_dot -= 2.0 * ratio * kinetic(x) * chain.pi(x) * chain.p(x);

    d.grad_psi_dot = EdgeField::Zero(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (chain.has_edge(x, y)) d.grad_psi_dot(x, y) = kinetic(x) - kinetic(y);
    return d;
}

RayResult integrate_ray(const GeodesicState& init, const MarkovChain& chain,
                        const IntegrateOptions& opts) {
    const EdgeList el(chain);
    RayResult result;
    Vec y = pack_state(init, el);
    double t = 0.0;
    double dt = opts.dt_init;

    const double s0 = state_speed(init, chain);
    auto record = [&](double time, const Vec& packed) {
        GeodesicState s = unpack_state(packed, el, chain.n);
        const double sp = state_speed(s, chain);
        result.trajectory.push_back({time, std::move(s), sp});
        if (s0 > 1e-14)
            result.speed_drift = std::max(result.speed_drift, std::abs(sp - s0) / s0);
    };
    record(0.0, y);

    if (init.mu.minCoeff() <= opts.eps_bd) {
        result.stop_reason = StopReason::boundary_touch;
        result.stop_time = 0.0;
        return result;
    }

    while (t < opts.t_max) {
        if (dt < opts.dt_min) {
            // Boundary takes precedence over underflow: probe one forced
            // Euler step to see whether the flow is entering the boundary.
            bool entering = false;
            try {
                const Vec probe = y + opts.dt_min * rhs_packed(y, el, chain);
                entering = probe.head(chain.n).minCoeff() <= opts.eps_bd;
            } catch (const BoundaryContact&) {
                entering = true;
            }
            result.stop_reason =
                entering ? StopReason::boundary_touch : StopReason::step_underflow;
            result.stop_time = t;
            return result;
        }
        const double step = std::min(dt, opts.t_max - t);
        bool rejected = false;
        Vec y_full, y_half;
        double err = kInf;
        try {
            y_full = rk4_step(y, step, el, chain);
            y_half = rk4_step(rk4_step(y, 0.5 * step, el, chain), 0.5 * step, el, chain);
            err = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i)
                err = std::max(err, std::abs(y_half(i) - y_full(i)) / (15.0 * (1.0 + std::abs(y(i)))));
        } catch (const BoundaryContact&) {
            rejected = true;
        }

        const double target = opts.rtol * step;
        if (!rejected && err <= target) {
            t += step;
            y = y_half;
            record(t, y);
            if (y.head(chain.n).minCoeff() <= opts.eps_bd) {
                result.stop_reason = StopReason::boundary_touch;
                result.stop_time = t;
                return result;
            }
            const double grow = err > 0.0 ? 0.9 * std::pow(target / err, 0.25) : 2.0;
            dt = step * std::min(2.0, std::max(0.1, grow));
        } else {
            const double shrink = (rejected || err <= 0.0 || !std::isfinite(err))
                                      ? 0.5
                                      : std::min(0.5, 0.9 * std::pow(target / err, 0.25));
            dt = step * std::max(0.05, shrink);
        }
    }
    result.stop_reason = StopReason::reached_Tmax;
    result.stop_time = opts.t_max;
    return result;
}

std::vector<RayResult> ray_fan(const Measure& start, const MarkovChain& chain, int n_rays,
                               const IntegrateOptions& opts, std::uint64_t seed) {
    if (!is_strictly_positive(start)) throw BoundaryStart("ray fan needs a strictly positive start");
    const int n = chain.n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<RayResult> results;
    results.reserve(n_rays);
    for (int k = 0; k < n_rays; ++k) {
        Vec psi = Vec::Zero(n);
        double h = 0.0;
        if (n == 2) {
            const double angle = 2.0 * M_PI * k / n_rays;
            psi(1) = std::cos(angle);
            h = std::sin(angle);
        } else {
            for (int x = 0; x < n; ++x) psi(x) = gauss(rng);
            psi.array() -= pair_node(psi, Vec::Ones(n), chain);  // mod constants
            h = gauss(rng);
            const double norm = std::sqrt(psi.squaredNorm() + h * h);
            psi /= norm;
            h /= norm;
        }
        GeodesicState init{start, h, gradient(psi, chain)};
        const double sp = state_speed(init, chain);
        const double scale = 1.0 / std::sqrt(sp);
        init.h *= scale;
        init.grad_psi *= scale;
        results.push_back(integrate_ray(init, chain, opts));
    }
    return results;
}

SolveReport shoot(const Measure& mu0, const Measure& mu1, const MarkovChain& chain,
                  const ShootOptions& opts) {
    if (!is_strictly_positive(mu0) || !is_strictly_positive(mu1))
        throw BoundaryStart("shooting requires strictly positive endpoints");
    const int n = chain.n;
    const EdgeList el(chain);
    const int E = el.size();

    constexpr int kReportN = 64;
    if ((mu0 - mu1).cwiseAbs().maxCoeff() == 0.0) {
        SolveReport rep;
        rep.trajectory = Trajectory::constant(mu0, kReportN, chain);
        rep.converged = true;
        rep.min_interior_mass = mu0.minCoeff();
        return rep;
    }

    IntegrateOptions iopts;
    iopts.t_max = 1.0;
    iopts.rtol = opts.rtol;
    iopts.eps_bd = 1e-12;
    iopts.dt_min = 1e-7;

    // Terminal state of the geodesic started from momenta q = (grad psi, h).
    auto terminal = [&](const Vec& q, RayResult* out) -> Vec {
        GeodesicState init{mu0, q(E), unpack_field(q.head(E), el, n)};
        RayResult ray = integrate_ray(init, chain, iopts);
        if (ray.stop_reason != StopReason::reached_Tmax)
            return Vec::Constant(n, kInf);
        const Vec end = ray.trajectory.back().state.mu;
        if (out) *out = std::move(ray);
        return end;
    };

    // Initial momenta from the convex solver's recovered potentials.
    Vec q = Vec::Zero(E + 1);
    q(E) = total_mass(mu1, chain) - total_mass(mu0, chain);
    if (opts.use_warm_start) {
        try {
            SolveOptions wopts;
            const SolveReport primal = distance_W(mu0, mu1, chain, opts.warm_start_N, wopts);
            if (primal.trajectory.psi) {
                const EdgeField g0 = gradient(primal.trajectory.psi->front(), chain);
                for (int e = 0; e < E; ++e) q(e) = g0(el.edges[e].first, el.edges[e].second);
                q(E) = primal.trajectory.h(0);
            }
        } catch (const Error&) {
            // fall back to the pure-source guess
        }
    }

    Vec res = terminal(q, nullptr) - mu1;
    double res_norm = res.cwiseAbs().maxCoeff();
    int it = 0;
    for (; it < opts.max_newton && std::isfinite(res_norm) && res_norm > opts.bvp_tol; ++it) {
        Mat J(n, E + 1);
        for (int j = 0; j <= E; ++j) {
            const double step = opts.fd_step * std::max(1.0, std::abs(q(j)));
            Vec qp = q;
            qp(j) += step;
            const Vec rp = terminal(qp, nullptr) - mu1;
            if (!rp.allFinite()) {
                qp(j) = q(j) - step;
                const Vec rm = terminal(qp, nullptr) - mu1;
                if (!rm.allFinite()) throw ShootingFailed("Jacobian probe hit the boundary");
                J.col(j) = (res - rm) / step;
            } else {
                J.col(j) = (rp - res) / step;
            }
        }
        const Vec d = Eigen::CompleteOrthogonalDecomposition<Mat>(J).solve(-res);

        double lambda = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Vec q_try = q + lambda * d;
            const Vec r_try = terminal(q_try, nullptr) - mu1;
            const double norm_try = r_try.allFinite() ? r_try.cwiseAbs().maxCoeff() : kInf;
            if (norm_try < res_norm * (1.0 - 1e-4 * lambda)) {
                q = q_try;
                res = r_try;
                res_norm = norm_try;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    if (!(res_norm <= opts.bvp_tol))
        throw ShootingFailed("terminal mismatch " + std::to_string(res_norm) + " after " +
                             std::to_string(it) + " Newton iterations");

    RayResult final_ray;
    terminal(q, &final_ray);

    // Discrete report trajectory: node measures sampled from the geodesic,
    // interval data re-derived by tangent solves so the discrete continuity
    // equation holds exactly.
    Trajectory traj;
    traj.mu.resize(kReportN + 1);
    {
        size_t cursor = 0;
        for (int k = 0; k <= kReportN; ++k) {
            const double tk = double(k) / kReportN;
            while (cursor + 1 < final_ray.trajectory.size() &&
                   final_ray.trajectory[cursor + 1].t <= tk)
                ++cursor;
            // linear interpolation between stored samples
            const auto& lo = final_ray.trajectory[cursor];
            const auto& hi = final_ray.trajectory[std::min(cursor + 1, final_ray.trajectory.size() - 1)];
            const double span = hi.t - lo.t;
            const double w = span > 0.0 ? (tk - lo.t) / span : 0.0;
            traj.mu[k] = (1.0 - w) * lo.state.mu + w * hi.state.mu;
        }
        traj.mu[0] = mu0;
    }
    traj.V.assign(kReportN, EdgeField::Zero(n, n));
    traj.h = Vec::Zero(kReportN);
    std::vector<Vec> psis(kReportN);
    for (int k = 0; k < kReportN; ++k) {
        const Vec rho = (traj.mu[k + 1] - traj.mu[k]) * double(kReportN);
        const Measure mid = 0.5 * (traj.mu[k] + traj.mu[k + 1]);
        const TangentSolve ts = solve_tangent(mid, rho, chain);
        traj.h(k) = ts.h;
        psis[k] = ts.psi;
        for (int e = 0; e < E; ++e) {
            const auto [x, y] = el.edges[e];
            const double v = log_mean(mid(x), mid(y)) * ts.grad_psi(x, y);
            traj.V[k](x, y) = v;
            traj.V[k](y, x) = -v;
        }
    }
    traj.psi = std::move(psis);

    SolveReport rep;
    const GeodesicState init{mu0, q(E), unpack_field(q.head(E), el, n)};
    rep.value = state_speed(init, chain);
    rep.distance = std::sqrt(std::max(0.0, rep.value));
    rep.trajectory = std::move(traj);
    rep.iterations = it;
    rep.converged = true;
    rep.opt_residual = res_norm;
    const Vec speeds = speed_profile(rep.trajectory, chain);
    rep.speed_variation = speeds.maxCoeff() <= 1e-12
                              ? 0.0
                              : speeds.maxCoeff() / std::max(speeds.minCoeff(), 1e-300) - 1.0;
    double mmin = kInf;
    for (int k = 1; k < kReportN; ++k) mmin = std::min(mmin, rep.trajectory.mu[k].minCoeff());
    rep.min_interior_mass = mmin;
    return rep;
}

}  // namespace graphflow
