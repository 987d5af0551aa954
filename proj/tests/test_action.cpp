#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace graphflow;
using namespace testing_oracles;

namespace {

// Pure-source path mu_t = mu0 + t c p with constant source rate c.
Trajectory source_path(const Measure& mu0, double c, int N, const MarkovChain& chain) {
    Trajectory traj;
    traj.mu.resize(N + 1);
    traj.V.assign(N, EdgeField::Zero(chain.n, chain.n));
    traj.h = Vec::Constant(N, c);
    for (int k = 0; k <= N; ++k) traj.mu[k] = mu0 + (double(k) / N) * c * chain.p;
    return traj;
}

}  // namespace

TEST_CASE("quadratic action: constant, pure-source and infinite cases") {
    const auto chain = reference_chain();
    Vec ones = Vec::Ones(2);

    CHECK(action_quad(Trajectory::constant(ones, 8, chain), chain) == 0.0);

    for (double c : {0.5, 2.0}) {
        const auto traj = source_path(ones, c, 16, chain);
        CHECK(action_quad(traj, chain) == doctest::Approx(c * c).epsilon(1e-14));
    }

    // flux across an edge whose midpoint mobility vanishes costs +inf:
    // state 0 stays empty while the edge still carries flux
    Trajectory inf_traj;
    inf_traj.mu.resize(2);
    inf_traj.mu[0] = Vec(2);
    inf_traj.mu[1] = Vec(2);
    inf_traj.mu[0] << 0.0, 1.0;
    inf_traj.mu[1] << 0.0, 0.4;
    EdgeField V = EdgeField::Zero(2, 2);
    V(0, 1) = -2.0;  // antisym difference -1 makes the continuity defect span{p}
    inf_traj.V = {V};
    inf_traj.h = Vec::Constant(1, -0.2);
    validate_trajectory(inf_traj, chain);
    CHECK(std::isinf(action_quad(inf_traj, chain)));
}

TEST_CASE("amplitude ordering: linsq vs quad") {
    const auto chain = reference_chain();
    // constant-speed path: the two functionals agree
    const auto traj = source_path(Vec::Ones(2), 1.5, 8, chain);
    CHECK(action_linsq(traj, chain) == doctest::Approx(action_quad(traj, chain)).epsilon(1e-12));

    // two intervals with amplitudes 0 and 2: quad 2, linsq 1
    Trajectory two = source_path(Vec::Ones(2), 0.0, 2, chain);
    two.h << 0.0, 2.0;
    two.mu[2] = two.mu[1] + 0.5 * 2.0 * chain.p;
    CHECK(action_quad(two, chain) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(action_linsq(two, chain) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(action_linsq(Trajectory::constant(Vec::Ones(2), 4, chain), chain) == 0.0);
}

TEST_CASE("shift-transport functional on pure-source paths") {
    const auto chain = reference_chain();
    for (double c : {0.5, 1.0}) {
        const auto traj = source_path(Vec::Ones(2), c, 8, chain);
        CHECK(shift_cost(traj, chain) == doctest::Approx(c * c).epsilon(1e-13));
    }

    // oscillating source (c, -3c): F sees total variation, quad sees energy
    const double c = 0.4;
    Trajectory osc = source_path(Vec::Constant(2, 2.0), 0.0, 2, chain);
    osc.h << c, -3.0 * c;
    osc.mu[1] = osc.mu[0] + 0.5 * c * chain.p;
    osc.mu[2] = osc.mu[1] - 0.5 * 3.0 * c * chain.p;
    CHECK(shift_cost(osc, chain) == doctest::Approx(4.0 * c * c).epsilon(1e-13));
    CHECK(action_quad(osc, chain) == doctest::Approx(5.0 * c * c).epsilon(1e-13));

    CHECK(shift_cost(Trajectory::constant(Vec::Ones(2), 4, chain), chain) == 0.0);
}

TEST_CASE("decreasing rearrangement of the source") {
    const auto chain = reference_chain();

    // already descending: identical trajectory
    Trajectory desc = source_path(Vec::Constant(2, 2.0), 0.0, 2, chain);
    desc.h << 1.0, -1.0;
    desc.mu[1] = desc.mu[0] + 0.5 * chain.p;
    desc.mu[2] = desc.mu[1] - 0.5 * chain.p;
    const auto same = rearrange_source(desc, chain);
    CHECK((same.h - desc.h).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k <= 2; ++k) CHECK((same.mu[k] - desc.mu[k]).cwiseAbs().maxCoeff() <= 1e-15);

    // ascending source gets front-loaded; interior nodes rise
    Trajectory asc = source_path(Vec::Ones(2), 0.0, 2, chain);
    asc.h << -1.0, 1.0;
    asc.mu[1] = asc.mu[0] - 0.5 * chain.p;
    asc.mu[2] = asc.mu[1] + 0.5 * chain.p;
    const auto front = rearrange_source(asc, chain);
    CHECK(front.h(0) == 1.0);
    CHECK(front.h(1) == -1.0);
    CHECK(front.mu[1](0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(front.mu[1](1) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK((front.mu[2] - asc.mu[2]).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((front.mu[0] - asc.mu[0]).cwiseAbs().maxCoeff() == 0.0);

    // property sweep: action never increases, endpoints and the source
    // multiset are preserved, rebuilt nodes dominate the originals
    std::mt19937_64 rng(81);
    const auto ch = random_reversible_chain(3, 82);
    for (int i = 0; i < 100; ++i) {
        const auto traj = random_valid_trajectory(ch, rng);
        const auto re = rearrange_source(traj, ch);
        CHECK(action_quad(re, ch, kCeTolFile) <= action_quad(traj, ch, kCeTolFile) + 1e-10);
        CHECK((re.mu.front() - traj.mu.front()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((re.mu.back() - traj.mu.back()).cwiseAbs().maxCoeff() <= 1e-12);
        Vec h1 = traj.h, h2 = re.h;
        std::sort(h1.data(), h1.data() + h1.size());
        std::sort(h2.data(), h2.data() + h2.size());
        CHECK((h1 - h2).cwiseAbs().maxCoeff() == 0.0);
        for (size_t k = 0; k < traj.mu.size(); ++k)
            CHECK(((re.mu[k] - traj.mu[k]).array() >= -1e-12).all());
    }
}

TEST_CASE("antisymmetrization of the flux") {
    const auto chain = random_reversible_chain(3, 83);
    std::mt19937_64 rng(84);

    for (int i = 0; i < 100; ++i) {
        const auto traj = random_valid_trajectory(chain, rng);
        const auto anti = antisymmetrize(traj, chain);
        CHECK(action_quad(anti, chain, kCeTolFile) <=
              action_quad(traj, chain, kCeTolFile) + 1e-10);
        for (int k = 0; k < traj.intervals(); ++k) {
            CHECK((divergence(anti.V[k], chain) - divergence(traj.V[k], chain))
                      .cwiseAbs()
                      .maxCoeff() <= 1e-14);
            CHECK((anti.V[k] + anti.V[k].transpose()).cwiseAbs().maxCoeff() <= 1e-15);
        }
        // idempotence
        const auto twice = antisymmetrize(anti, chain);
        for (int k = 0; k < traj.intervals(); ++k)
            CHECK((twice.V[k] - anti.V[k]).cwiseAbs().maxCoeff() == 0.0);
    }

    // symmetric flux vanishes entirely
    Trajectory traj = Trajectory::constant(Vec::Ones(3), 2, chain);
    EdgeField sym = EdgeField::Zero(3, 3);
    sym(0, 1) = sym(1, 0) = 1.3;
    traj.V[0] = sym;
    traj.h(0) = 0.0;  // symmetric flux has zero divergence, continuity intact
    const auto anti = antisymmetrize(traj, chain);
    CHECK(anti.V[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("speed profile and mass balance") {
    const auto chain = reference_chain();
    const double c = 0.8;
    const auto traj = source_path(Vec::Ones(2), c, 8, chain);
    const Vec s = speed_profile(traj, chain);
    for (int k = 0; k < 8; ++k) CHECK(s(k) == doctest::Approx(c * c).epsilon(1e-14));
    CHECK(speed_profile(Trajectory::constant(Vec::Ones(2), 4, chain), chain).cwiseAbs().maxCoeff() ==
          0.0);

    std::mt19937_64 rng(85);
    const auto ch = random_reversible_chain(3, 86);
    for (int i = 0; i < 50; ++i) {
        const auto t = random_valid_trajectory(ch, rng);
        for (int k = 0; k < t.intervals(); ++k) {
            const double dm = total_mass(t.mu[k + 1], ch) - total_mass(t.mu[k], ch);
            CHECK(dm == doctest::Approx(t.h(k) * t.dt()).epsilon(1e-12));
        }
    }
}

TEST_CASE("flux/potential consistency of the quadratic action") {
    // trajectories whose flux is exactly mobility * grad psi satisfy
    // action == a^2 dt sum h^2 + b^2 dt sum ||grad psi||^2_mid
    const auto chain = random_reversible_chain(3, 87);
    std::mt19937_64 rng(88);
    for (int i = 0; i < 20; ++i) {
        const int N = 6;
        Trajectory traj;
        traj.mu.resize(N + 1);
        traj.V.assign(N, EdgeField::Zero(3, 3));
        traj.h = Vec::Zero(N);
        std::vector<Vec> psis(N);
        traj.mu[0] = random_interior_measure(3, rng());
        for (int k = 0; k < N; ++k) {
            const Vec psi = 0.2 * random_vector(3, rng);
            // iterate once: midpoint depends on the step taken
            Measure mid = traj.mu[k];
            for (int pass = 0; pass < 40; ++pass) {
                EdgeField V = gradient(psi, chain);
                const auto mob = mobility(mid);
                for (int x = 0; x < 3; ++x)
                    for (int y = 0; y < 3; ++y) V(x, y) *= mob.values(x, y);
                const double h = 0.1;
                const Vec next = traj.mu[k] + (h * chain.p - divergence(V, chain)) / double(N);
                traj.V[k] = V;
                traj.h(k) = h;
                traj.mu[k + 1] = next;
                const Measure new_mid = 0.5 * (traj.mu[k] + next);
                if ((new_mid - mid).cwiseAbs().maxCoeff() < 1e-15) break;
                mid = new_mid;
            }
            psis[k] = psi;
        }
        traj.psi = psis;
        double expected = 0.0;
        for (int k = 0; k < N; ++k)
            expected += traj.h(k) * traj.h(k) +
                        edge_norm_sq(gradient(psis[k], chain), traj.midpoint(k), chain);
        expected *= traj.dt();
        CHECK(action_quad(traj, chain) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("trajectory CSV round-trips and validates") {
    const auto chain = random_reversible_chain(3, 91);
    std::mt19937_64 rng(92);
    const auto traj = random_valid_trajectory(chain, rng);
    const std::string csv = trajectory_to_csv(traj, chain);
    const auto back = trajectory_from_csv(csv, chain);
    REQUIRE(back.intervals() == traj.intervals());
    for (size_t k = 0; k < traj.mu.size(); ++k)
        CHECK((back.mu[k] - traj.mu[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.h - traj.h).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < traj.intervals(); ++k)
        CHECK((back.V[k] - traj.V[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectory validation rejects broken inputs") {
    const auto chain = reference_chain();
    Trajectory traj = Trajectory::constant(Vec::Ones(2), 4, chain);
    traj.h(2) = 1.0;  // breaks continuity
    CHECK_THROWS_AS(validate_trajectory(traj, chain), InvalidTrajectory);

    Trajectory neg = Trajectory::constant(Vec::Ones(2), 4, chain);
    neg.mu[2](0) = -0.5;
    CHECK_THROWS_AS(validate_trajectory(neg, chain), InvalidTrajectory);
}
