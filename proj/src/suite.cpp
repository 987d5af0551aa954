#include "graphflow/suite.hpp"

#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "graphflow/duality.hpp"
#include "graphflow/geodesic.hpp"

namespace graphflow {

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Random valid trajectory on a fixed 3-state chain: random canonical
// fluxes and sources, forward-integrated and rescaled until every node
// measure stays nonnegative.
Trajectory random_trajectory(const MarkovChain& chain, std::mt19937_64& rng, bool antisym_flux) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = chain.n, N = 8;
    Trajectory traj;
    traj.mu.resize(N + 1);
    traj.V.assign(N, EdgeField::Zero(n, n));
    traj.h.resize(N);
    Vec mu0(n);
    for (int x = 0; x < n; ++x) mu0(x) = 0.5 + 0.5 * std::abs(uni(rng));
    for (int k = 0; k < N; ++k) {
        traj.h(k) = 0.3 * uni(rng);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (x != y && chain.has_edge(x, y)) traj.V[k](x, y) = 0.2 * uni(rng);
        if (antisym_flux) traj.V[k] = antisymmetric_part(traj.V[k]);
    }
    for (int scale_try = 0; scale_try < 20; ++scale_try) {
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

CriterionResult criterion_1() {
    const auto t0 = Clock::now();
    Check c;
    const auto chain = reference_chain();
    Vec mu0(2), mu1(2);
    mu0 << 0.6, 0.8;
    mu1 = mu0 + 0.5 * chain.p;

    const auto w = distance_W(mu0, mu1, chain, 64);
    c.require(w.converged, "W solve did not converge");
    c.require(std::abs(w.distance - 0.5) <= 1e-3, "W=" + fmt(w.distance) + " not 0.5+-1e-3");

    const auto d = distance_D(mu0, mu1, chain, 64);
    c.require(d.converged, "D solve did not converge");
    c.require(std::abs(d.distance - 0.5) <= 1e-3, "D=" + fmt(d.distance) + " not 0.5+-1e-3");

    const auto gap = duality_gap(mu0, mu1, chain, 64);
    c.require(gap.feasibility_margin <= kFeasTol, "certificate infeasible");
    c.require(std::abs(gap.rel_gap) <= 1e-6, "duality gap " + fmt(gap.rel_gap) + " > 1e-6");

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.require(secs <= 10.0, "runtime " + fmt(secs) + "s > 10s");
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "W=" << fmt(w.distance)
             << " D=" << fmt(d.distance) << " gap=" << fmt(gap.rel_gap) << " t=" << fmt(secs)
             << "s";
    return {1, "span-direction distance and tight duality", c.pass, c.detail.str(), secs};
}

CriterionResult criterion_2() {
    const auto t0 = Clock::now();
    Check c;
    const auto chain = reference_chain();
    IntegrateOptions opts;  // T_max=3, eps_bd=1e-6, dt_min=5e-4, rtol=1e-7

    int reached = 0, boundary = 0, underflow = 0;
    double max_drift = 0.0;
    for (auto [sx, sy] : {std::pair{0.6, 0.8}, std::pair{0.05, 1.0}}) {
        Vec start(2);
        start << sx, sy;
        const auto rays = ray_fan(start, chain, 72, opts);
        c.require(static_cast<int>(rays.size()) == 72, "missing rays");
        for (const auto& r : rays) {
            switch (r.stop_reason) {
                case StopReason::reached_Tmax: ++reached; break;
                case StopReason::boundary_touch: ++boundary; break;
                case StopReason::step_underflow: ++underflow; break;
            }
            c.require(r.stop_time <= 3.0 + 1e-12, "ray overran T_max");
            max_drift = std::max(max_drift, r.speed_drift);
        }
    }
    c.require(max_drift <= 1e-4, "speed drift " + fmt(max_drift) + " > 1e-4");
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.require(secs <= 30.0, "runtime " + fmt(secs) + "s > 30s");
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "stops Tmax/boundary/underflow=" << reached
             << "/" << boundary << "/" << underflow << " drift=" << fmt(max_drift)
             << " t=" << fmt(secs) << "s";
    return {2, "ray-fan reproduction (two starts, 72 rays)", c.pass, c.detail.str(), secs};
}

CriterionResult criterion_3(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Check c;
    int strict_checked = 0, me_checked = 0;
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + i % 3;
        // Transport priced well above the source (b >> a) and endpoints
        // kept apart, so the absolute comparison margins stay macroscopic
        // on probability-normalized instances.
        MarkovChain chain = random_reversible_chain(n, seed * 1000 + i);
        chain.a = 0.5 + 0.03 * (i % 5);
        chain.b = 1.8 + 0.08 * (i % 7);
        Measure mu0 = random_interior_measure(n, seed * 2000 + i);
        Measure mu1 = random_interior_measure(n, seed * 3000 + i);
        for (int bump = 0; bump < 8; ++bump) {
            const Measure q0 = mu0 / total_mass(mu0, chain);
            const Measure q1 = mu1 / total_mass(mu1, chain);
            if ((q0 - q1).cwiseAbs().maxCoeff() >= 0.35) break;
            mu1 = random_interior_measure(n, seed * 3000 + 100 * (bump + 1) + i);
        }

        const auto w = distance_W(mu0, mu1, chain, 64);
        const auto d = distance_D(mu0, mu1, chain, 64);
        c.require(w.converged && d.converged, "instance " + std::to_string(i) + " not converged");
        c.require(d.distance <= w.distance + 2e-3,
                  "instance " + std::to_string(i) + ": D > W + 2e-3");
        if (span_distance(mu1 - mu0, chain.p) >= 0.1) {
            ++strict_checked;
            c.require(w.distance - d.distance >= 1e-3,
                      "instance " + std::to_string(i) + ": strict W-D gap " +
                          fmt(w.distance - d.distance) + " < 1e-3");
        }

        const Measure q0 = mu0 / total_mass(mu0, chain);
        const Measure q1 = mu1 / total_mass(mu1, chain);
        if ((q0 - q1).cwiseAbs().maxCoeff() > 1e-6) {
            ++me_checked;
            const auto me = distance_ME(q0, q1, chain, 64);
            const auto wq = distance_W(q0, q1, chain, 64);
            c.require(me.converged && wq.converged,
                      "instance " + std::to_string(i) + " (prob) not converged");
            c.require(wq.distance <= me.distance - 1e-3,
                      "instance " + std::to_string(i) + ": W " + fmt(wq.distance) +
                          " not < ME " + fmt(me.distance) + " - 1e-3");
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "20 instances, strict-gap checked on "
             << strict_checked << ", ME on " << me_checked << ", t=" << fmt(secs) << "s";
    return {3, "metric comparisons: D <= W (strict off span{p}), W < ME", c.pass, c.detail.str(),
            secs};
}

CriterionResult criterion_4(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Check c;
    const auto chain2 = reference_chain();
    struct Instance {
        MarkovChain chain;
        Measure mu0, mu1;
    };
    std::vector<Instance> instances;
    {
        Vec a(2), b(2), z0(2), z1(2);
        a << 0.6, 0.8;
        b = a + 0.5 * chain2.p;
        z0 << 1, 0;
        z1 << 0, 1;
        instances.push_back({chain2, a, b});
        instances.push_back({chain2, z0, z1});
    }
    for (int i = 0; i < 3; ++i) {
        auto chain = random_reversible_chain(3, seed * 77 + i);
        instances.push_back({chain, random_interior_measure(3, seed * 88 + i),
                             random_interior_measure(3, seed * 99 + i)});
    }

    double worst_var = 0.0, worst_up = 0.0, worst_down = 0.0;
    for (size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const auto rep = distance_W(inst.mu0, inst.mu1, inst.chain, 64);
        c.require(rep.converged, "instance " + std::to_string(i) + " not converged");
        worst_var = std::max(worst_var, rep.speed_variation);
        c.require(rep.speed_variation <= 5e-2, "speed variation " + fmt(rep.speed_variation));

        const double base = action_quad(rep.trajectory, inst.chain);
        const double after_r = action_quad(rearrange_source(rep.trajectory, inst.chain), inst.chain);
        const auto anti = antisymmetrize(rep.trajectory, inst.chain);
        const double after_a = action_quad(anti, inst.chain);
        for (double after : {after_r, after_a}) {
            worst_up = std::max(worst_up, after - base);
            worst_down = std::max(worst_down, base - after);
            c.require(after - base <= 1e-10, "post-processing raised action by " +
                                                 fmt(after - base));
            c.require(base - after <= 1e-6,
                      "post-processing improved action by " + fmt(base - after));
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "max speed variation " << fmt(worst_var)
             << ", post-processing drift [" << fmt(-worst_down) << ", " << fmt(worst_up) << "]";
    return {4, "constant-speed geodesics; minimizers fixed by post-processing", c.pass,
            c.detail.str(), secs};
}

CriterionResult criterion_5(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Check c;
    struct Instance {
        MarkovChain chain;
        Measure mu0, mu1;
    };
    std::vector<Instance> instances;
    {
        const auto chain = reference_chain();
        Vec z0(2), z1(2);
        z0 << 1, 0;
        z1 << 0, 1;
        instances.push_back({chain, z0, z1});
    }
    std::mt19937_64 rng(seed + 5);
    for (int i = 0; i < 5; ++i) {
        auto chain = random_reversible_chain(3, seed * 55 + i);
        Measure mu0 = random_interior_measure(3, rng());
        Measure mu1 = random_interior_measure(3, rng());
        mu0(i % 3) = 0.0;  // boundary-supported endpoints
        mu1((i + 1) % 3) = 0.0;
        instances.push_back({chain, mu0, mu1});
    }
    double min_mass = 1e300, min_h = 1e300;
    for (size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const auto rep = distance_W(inst.mu0, inst.mu1, inst.chain, 64);
        c.require(rep.converged, "instance " + std::to_string(i) + " not converged");
        const auto diag = check_nonlocality(rep);
        c.require(!diag.vacuous, "instance " + std::to_string(i) + " vacuous");
        c.require(diag.min_interior_mass > 0.0,
                  "instance " + std::to_string(i) + ": boundary-touching interior");
        c.require(diag.min_abs_source > 0.0,
                  "instance " + std::to_string(i) + ": vanishing source rate");
        min_mass = std::min(min_mass, diag.min_interior_mass);
        min_h = std::min(min_h, diag.min_abs_source);
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "min interior mass " << fmt(min_mass)
             << ", min |h| " << fmt(min_h);
    return {5, "non-locality: interior support and nonvanishing source", c.pass, c.detail.str(),
            secs};
}

CriterionResult criterion_6(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Check c;
    std::mt19937_64 rng(seed + 6);
    std::uniform_real_distribution<double> mass(0.0, 3.0);
    std::uniform_real_distribution<double> pos(1e-3, 3.0);
    std::uniform_real_distribution<double> sym(-2.0, 2.0);

    double worst_euler = 0.0, worst_ibp = 0.0, worst_cons = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double u = mass(rng), v = mass(rng), w = mass(rng);
        const double lam = pos(rng);
        c.require(std::abs(log_mean(u, v) - log_mean(v, u)) <= 1e-12 * (1 + u + v), "theta symmetry");
        c.require(std::abs(log_mean(lam * u, lam * v) - lam * log_mean(u, v)) <=
                      1e-12 * lam * (1 + u + v),
                  "theta homogeneity");
        c.require(log_mean(std::min(u, w), v) <= log_mean(std::max(u, w), v) + 1e-14,
                  "theta monotonicity");
        c.require(log_mean(u, v) <= 0.5 * (u + v) + 1e-12, "theta vs arithmetic mean");

        const double ue = pos(rng), ve = pos(rng);
        const double euler =
            std::abs(log_mean_d1(ue, ve) * ue + log_mean_d1(ve, ue) * ve - log_mean(ue, ve));
        worst_euler = std::max(worst_euler, euler);
        c.require(euler <= 1e-8, "Euler identity residual " + fmt(euler));

        // concavity comparison at independent points
        const double s1 = pos(rng), s2 = pos(rng);
        c.require(log_mean_d1(s1, s2) * ue + log_mean_d1(s2, s1) * ve >=
                      log_mean(ue, ve) - 1e-9 * (1 + ue + ve),
                  "theta concavity inequality");

        // alpha midpoint convexity on finite-valued triples
        const double v1 = sym(rng), v2 = sym(rng);
        const double a1 = alpha(v1, u + 1e-6, v + 1e-6), a2 = alpha(v2, w + 1e-6, ve);
        const double am =
            alpha(0.5 * (v1 + v2), 0.5 * (u + w) + 0.5e-6 + 0.5e-6, 0.5 * (v + 1e-6 + ve));
        c.require(am <= 0.5 * (a1 + a2) + 1e-10, "alpha midpoint convexity");

        // alpha affine along rays Z2 = kappa Z1
        const double kappa = 0.3 + 2.0 * pos(rng) / 3.0;
        const double b0 = alpha(v1, ue, ve), b1 = alpha(kappa * v1, kappa * ue, kappa * ve);
        const double tmix = 0.25 + 0.5 * pos(rng) / 3.0;
        const double bm = alpha((1 - tmix + tmix * kappa) * v1, (1 - tmix + tmix * kappa) * ue,
                                (1 - tmix + tmix * kappa) * ve);
        const double ray_residual = std::abs(bm - ((1 - tmix) * b0 + tmix * b1));
        c.require(ray_residual <= 1e-10 * (1.0 + b0 + b1), "alpha ray affineness " + fmt(ray_residual));
    }

    const auto chain = random_reversible_chain(3, seed + 63);
    for (int i = 0; i < 1000; ++i) {
        Vec psi(3), f(3);
        EdgeField Psi = EdgeField::Zero(3, 3);
        for (int x = 0; x < 3; ++x) {
            psi(x) = sym(rng);
            f(x) = sym(rng);
            for (int y = 0; y < 3; ++y)
                if (x != y && chain.has_edge(x, y)) Psi(x, y) = sym(rng);
        }
        const double ibp = std::abs(pair_edge(gradient(psi, chain), Psi, chain) +
                                    pair_node(psi, divergence(Psi, chain), chain));
        worst_ibp = std::max(worst_ibp, ibp);
        c.require(ibp <= 1e-12 * (1 + psi.cwiseAbs().maxCoeff()), "integration by parts");
        const double cons = std::abs(pair_node(divergence(Psi, chain), Vec::Ones(3), chain));
        worst_cons = std::max(worst_cons, cons);
        c.require(cons <= 1e-12, "divergence mass conservation");
    }

    for (int i = 0; i < 1000; ++i) {
        const auto traj = random_trajectory(chain, rng, false);
        const double quad = action_quad(traj, chain, kCeTolFile);
        const double linsq = action_linsq(traj, chain, kCeTolFile);
        c.require(linsq <= quad + 1e-12, "Jensen ordering");
        const double re = action_quad(rearrange_source(traj, chain, kCeTolFile), chain, kCeTolFile);
        c.require(re <= quad + 1e-10, "rearrangement increased action");
        const auto anti = antisymmetrize(traj, chain);
        const double an = action_quad(anti, chain, kCeTolFile);
        c.require(an <= quad + 1e-10, "antisymmetrization increased action");
        for (int k = 0; k < traj.intervals(); ++k) {
            const double dd = (divergence(anti.V[k], chain) - divergence(traj.V[k], chain))
                                  .cwiseAbs()
                                  .maxCoeff();
            c.require(dd <= 1e-14, "antisymmetrization changed divergence");
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "worst Euler " << fmt(worst_euler)
             << ", ibp " << fmt(worst_ibp) << ", conservation " << fmt(worst_cons);
    return {6, "inequality battery (1000 samples each)", c.pass, c.detail.str(), secs};
}

CriterionResult criterion_7(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Check c;
    const auto chain = reference_chain();
    std::mt19937_64 rng(seed + 7);
    std::uniform_real_distribution<double> uni(0.3, 1.6);

    int converged_pairs = 0;
    double worst_rel = 0.0;
    for (int i = 0; converged_pairs < 5 && i < 12; ++i) {
        Vec mu0(2), mu1(2);
        mu0 << uni(rng), uni(rng);
        mu1 << uni(rng), uni(rng);
        try {
            const auto shot = shoot(mu0, mu1, chain);
            const auto w = distance_W(mu0, mu1, chain, 128);
            ++converged_pairs;
            const double rel = std::abs(shot.value - w.value) / std::max(w.value, 1e-12);
            worst_rel = std::max(worst_rel, rel);
            c.require(rel <= 1e-2, "pair " + std::to_string(i) + " disagreement " + fmt(rel));
        } catch (const ShootingFailed&) {
            // endpoint pair too aggressive for shooting; skip
        }
    }
    c.require(converged_pairs == 5, "only " + std::to_string(converged_pairs) + " shooting pairs");

    // Right-hand sides vs central differences of the discrete action terms.
    double worst_fd = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + i % 2;
        const auto ch = random_reversible_chain(n, seed * 31 + i);
        GeodesicState s;
        s.mu = random_interior_measure(n, seed * 41 + i, 0.4, 1.5);
        s.h = 0.3 * (i % 5 - 2);
        Vec psi(n);
        for (int x = 0; x < n; ++x) psi(x) = 0.4 * ((i + x) % 7 - 3);
        s.grad_psi = gradient(psi, ch);

        const auto d = geodesic_rhs(s, ch);
        const double eps = 1e-6;
        const double ratio = ch.b * ch.b / (2.0 * ch.a * ch.a);

        // source momentum vs mass-direction derivative of the kinetic term
        const double tp = edge_norm_sq(s.grad_psi, s.mu + eps * ch.p, ch);
        const double tm = edge_norm_sq(s.grad_psi, s.mu - eps * ch.p, ch);
        const double fd_h = -ratio * (tp - tm) / (2 * eps);
        worst_fd = std::max(worst_fd, std::abs(d.h_dot - fd_h));
        c.require(std::abs(d.h_dot - fd_h) <= 1e-6, "h_dot vs finite difference");

        // edge momentum vs nodewise derivative of the kinetic term
        Vec node_grad(n);
        for (int x = 0; x < n; ++x) {
            Vec mup = s.mu, mum = s.mu;
            mup(x) += eps;
            mum(x) -= eps;
            node_grad(x) = (edge_norm_sq(s.grad_psi, mup, ch) - edge_norm_sq(s.grad_psi, mum, ch)) /
                           (2 * eps);
        }
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (ch.has_edge(x, y)) {
                    const double fd = 0.5 * (node_grad(x) / ch.pi(x) - node_grad(y) / ch.pi(y));
                    worst_fd = std::max(worst_fd, std::abs(d.grad_psi_dot(x, y) - fd));
                    c.require(std::abs(d.grad_psi_dot(x, y) - fd) <= 1e-6,
                              "grad_psi_dot vs finite difference");
                }

        // measure equation vs potential derivative of the kinetic term
        for (int x = 0; x < n; ++x) {
            Vec pp = psi, pm = psi;
            pp(x) += eps;
            pm(x) -= eps;
            const double fd = (edge_norm_sq(gradient(pp, ch), s.mu, ch) -
                               edge_norm_sq(gradient(pm, ch), s.mu, ch)) /
                              (2 * eps);
            const double expect = s.h * ch.p(x) + fd / (2 * ch.pi(x));
            worst_fd = std::max(worst_fd, std::abs(d.mu_dot(x) - expect));
            c.require(std::abs(d.mu_dot(x) - expect) <= 1e-6, "mu_dot vs finite difference");
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "worst shoot/W disagreement "
             << fmt(worst_rel) << ", worst rhs-vs-FD " << fmt(worst_fd);
    return {7, "cross-solver agreement and first-variation identities", c.pass, c.detail.str(),
            secs};
}

CriterionResult criterion_8(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Check c;
    struct Instance {
        MarkovChain chain;
        Measure mu0, mu1;
    };
    std::vector<Instance> instances;
    {
        const auto chain = reference_chain();
        Vec a(2);
        a << 0.6, 0.8;
        instances.push_back({chain, a, a + 0.5 * chain.p});
    }
    for (int i = 0; i < 3; ++i) {
        auto chain = random_reversible_chain(3, seed * 17 + i);
        instances.push_back({chain, random_interior_measure(3, seed * 27 + i, 0.3, 1.4),
                             random_interior_measure(3, seed * 37 + i, 0.3, 1.4)});
    }
    double worst_gap = 0.0;
    for (size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const auto gap = duality_gap(inst.mu0, inst.mu1, inst.chain, 64);
        c.require(gap.feasibility_margin <= kFeasTol,
                  "instance " + std::to_string(i) + " infeasible certificate");
        c.require(gap.dual <= gap.primal_half_sq + 2e-3,
                  "instance " + std::to_string(i) + " weak duality violated");
        c.require(gap.rel_gap <= 5e-2,
                  "instance " + std::to_string(i) + " gap " + fmt(gap.rel_gap) + " > 5e-2");
        worst_gap = std::max(worst_gap, gap.rel_gap);
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "worst relative gap " << fmt(worst_gap);
    return {8, "weak duality and constructed-certificate gaps", c.pass, c.detail.str(), secs};
}

}  // namespace

MarkovChain reference_chain() {
    Mat K(2, 2);
    K << 0.8, 0.2, 0.4, 0.6;
    return make_chain(K, Vec(), Vec(), 1.0, 1.0);
}

MarkovChain random_reversible_chain(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    // random walk on a weighted complete graph: reversible by construction
    Mat S(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = x; y < n; ++y) S(x, y) = S(y, x) = uni(rng);
    const Vec row = S.rowwise().sum();
    Mat K(n, n);
    for (int x = 0; x < n; ++x) K.row(x) = S.row(x) / row(x);
    Vec pi = row / row.sum();
    Vec p(n);
    for (int x = 0; x < n; ++x) p(x) = uni(rng);
    p /= p.dot(pi);
    return make_chain(K, pi, p, 1.0, 1.0);
}

Measure random_interior_measure(int n, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    Measure mu(n);
    for (int x = 0; x < n; ++x) mu(x) = uni(rng);
    return mu;
}

double span_distance(const Vec& diff, const Vec& p) {
    const Vec ratio = diff.array() / p.array();
    double lo = ratio.minCoeff(), hi = ratio.maxCoeff();
    auto norm = [&](double c) { return (diff - c * p).cwiseAbs().maxCoeff(); };
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (norm(m1) <= norm(m2))
            hi = m2;
        else
            lo = m1;
    }
    return norm(0.5 * (lo + hi));
}

std::vector<CriterionResult> run_acceptance_suite(std::uint64_t seed) {
    std::vector<CriterionResult> results;
    results.push_back(criterion_1());
    results.push_back(criterion_2());
    results.push_back(criterion_3(seed + 1));
    results.push_back(criterion_4(seed + 1));
    results.push_back(criterion_5(seed + 1));
    results.push_back(criterion_6(seed + 1));
    results.push_back(criterion_7(seed + 1));
    results.push_back(criterion_8(seed + 1));
    return results;
}

std::string suite_to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    bool all = true;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json j;
        j["id"] = r.id;
        j["name"] = r.name;
        j["pass"] = r.pass;
        j["detail"] = r.detail;
        j["seconds"] = r.seconds;
        list.push_back(j);
        all = all && r.pass;
    }
    doc["criteria"] = list;
    doc["all_pass"] = all;
    return doc.dump(2) + "\n";
}

}  // namespace graphflow
