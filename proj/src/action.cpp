#include "graphflow/action.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace graphflow {

namespace {

void format_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    // keeps trailing empty fields, unlike getline-based splitting
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
        const size_t next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

}  // namespace

Trajectory Trajectory::constant(const Measure& mu0, int N, const MarkovChain& chain) {
    Trajectory t;
    t.mu.assign(N + 1, mu0);
    t.V.assign(N, EdgeField::Zero(chain.n, chain.n));
    t.h = Vec::Zero(N);
    return t;
}

double continuity_residual(const Trajectory& traj, const MarkovChain& chain) {
    const int N = traj.intervals();
    double res = 0.0;
    for (int k = 0; k < N; ++k) {
        const Vec defect =
            (traj.mu[k + 1] - traj.mu[k]) * N + divergence(traj.V[k], chain) - traj.h(k) * chain.p;
        res = std::max(res, defect.cwiseAbs().maxCoeff());
    }
    return res;
}

void validate_trajectory(const Trajectory& traj, const MarkovChain& chain, double ce_tol) {
    const int N = traj.intervals();
    if (N < 1 || static_cast<int>(traj.mu.size()) != N + 1 || traj.h.size() != N)
        throw InvalidTrajectory("inconsistent trajectory field sizes");
    for (const auto& m : traj.mu) {
        if (m.size() != chain.n) throw InvalidTrajectory("measure length mismatch");
        if (m.minCoeff() < -ce_tol) throw InvalidTrajectory("negative node measure");
    }
    if (traj.psi && static_cast<int>(traj.psi->size()) != N)
        throw InvalidTrajectory("potential count mismatch");
    const double res = continuity_residual(traj, chain);
    if (res > ce_tol)
        throw InvalidTrajectory("continuity residual " + std::to_string(res) + " exceeds tolerance");
}

double transport_rate(const Measure& mu, const EdgeField& V, const MarkovChain& chain) {
    const int n = chain.n;
    double acc = 0.0;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (!chain.has_edge(x, y)) continue;
            const double a = alpha(V(x, y), mu(x), mu(y));
            if (std::isinf(a)) return std::numeric_limits<double>::infinity();
            acc += a * chain.K(x, y) * chain.pi(x);
        }
    }
    return 0.5 * acc;
}

Vec speed_profile(const Trajectory& traj, const MarkovChain& chain) {
    const int N = traj.intervals();
    Vec s(N);
    for (int k = 0; k < N; ++k) {
        s(k) = chain.a * chain.a * traj.h(k) * traj.h(k) +
               chain.b * chain.b * transport_rate(traj.midpoint(k), traj.V[k], chain);
    }
    return s;
}

double action_quad(const Trajectory& traj, const MarkovChain& chain, double ce_tol) {
    validate_trajectory(traj, chain, ce_tol);
    const Vec s = speed_profile(traj, chain);
    return s.sum() * traj.dt();
}

double action_linsq(const Trajectory& traj, const MarkovChain& chain, double ce_tol) {
    validate_trajectory(traj, chain, ce_tol);
    const Vec s = speed_profile(traj, chain);
    const double len = s.array().sqrt().sum() * traj.dt();
    return len * len;
}

double shift_cost(const Trajectory& traj, const MarkovChain& chain, double ce_tol) {
    validate_trajectory(traj, chain, ce_tol);
    const int N = traj.intervals();
    double source_len = 0.0, transport_len = 0.0;
    for (int k = 0; k < N; ++k) {
        source_len += std::abs(traj.h(k));
        transport_len += std::sqrt(transport_rate(traj.midpoint(k), traj.V[k], chain));
    }
    source_len *= traj.dt();
    transport_len *= traj.dt();
    return chain.a * chain.a * source_len * source_len +
           chain.b * chain.b * transport_len * transport_len;
}

Trajectory rearrange_source(const Trajectory& traj, const MarkovChain& chain, double ce_tol) {
    validate_trajectory(traj, chain, ce_tol);
    const int N = traj.intervals();
    Trajectory out;
    out.V = traj.V;
    out.h = traj.h;
    std::sort(out.h.data(), out.h.data() + N, std::greater<double>());

    // The partial sums of the descending sort dominate those of any
    // ordering, so the rebuilt interior measures sit above the originals
    // and in particular stay nonnegative.
    out.mu.resize(N + 1);
    out.mu[0] = traj.mu[0];
    const double dt = traj.dt();
    for (int k = 0; k < N; ++k)
        out.mu[k + 1] = out.mu[k] + dt * (out.h(k) * chain.p - divergence(out.V[k], chain));
    return out;
}

Trajectory antisymmetrize(const Trajectory& traj, const MarkovChain& chain) {
    Trajectory out = traj;
    for (auto& V : out.V) V = canonicalize(antisymmetric_part(V), chain);
    out.psi.reset();
    return out;
}

std::string trajectory_to_csv(const Trajectory& traj, const MarkovChain& chain) {
    const int n = chain.n;
    const int N = traj.intervals();
    std::vector<std::pair<int, int>> edges;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y && chain.has_edge(x, y)) edges.emplace_back(x, y);

    std::string out = "row,t";
    for (int x = 0; x < n; ++x) out += ",mu_" + chain.states[x];
    out += ",h,speed";
    for (auto [x, y] : edges) out += ",V_" + chain.states[x] + "_" + chain.states[y];
    out += "\n";

    const Vec speeds = speed_profile(traj, chain);
    const double dt = traj.dt();
    for (int k = 0; k <= N; ++k) {
        out += "node,";
        format_double(out, k * dt);
        for (int x = 0; x < n; ++x) {
            out += ",";
            format_double(out, traj.mu[k](x));
        }
        out += ",,";
        for (size_t e = 0; e < edges.size(); ++e) out += ",";
        out += "\n";
        if (k == N) break;
        out += "interval,";
        format_double(out, (k + 0.5) * dt);
        for (int x = 0; x < n; ++x) out += ",";
        out += ",";
        format_double(out, traj.h(k));
        out += ",";
        format_double(out, speeds(k));
        for (auto [x, y] : edges) {
            out += ",";
            format_double(out, traj.V[k](x, y));
        }
        out += "\n";
    }
    return out;
}

Trajectory trajectory_from_csv(const std::string& csv, const MarkovChain& chain, double ce_tol) {
    const int n = chain.n;
    std::vector<std::pair<int, int>> edges;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y && chain.has_edge(x, y)) edges.emplace_back(x, y);

    std::stringstream ss(csv);
    std::string line;
    if (!std::getline(ss, line)) throw IoError("empty trajectory CSV");

    Trajectory traj;
    std::vector<double> hs;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() < static_cast<size_t>(2 + n + 2 + edges.size()))
            throw IoError("short trajectory CSV row");
        if (cols[0] == "node") {
            Vec m(n);
            for (int x = 0; x < n; ++x) m(x) = std::stod(cols[2 + x]);
            traj.mu.push_back(m);
        } else if (cols[0] == "interval") {
            hs.push_back(std::stod(cols[2 + n]));
            EdgeField V = EdgeField::Zero(n, n);
            for (size_t e = 0; e < edges.size(); ++e)
                V(edges[e].first, edges[e].second) = std::stod(cols[2 + n + 2 + e]);
            traj.V.push_back(V);
        } else {
            throw IoError("unknown trajectory CSV row type: " + cols[0]);
        }
    }
    traj.h = Eigen::Map<Vec>(hs.data(), static_cast<Eigen::Index>(hs.size()));
    validate_trajectory(traj, chain, ce_tol);
    return traj;
}

}  // namespace graphflow
