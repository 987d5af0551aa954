#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace graphflow;
using namespace testing_oracles;

TEST_CASE("logarithmic mean: closed cases and quadrature oracle") {
    CHECK(log_mean(2, 2) == 2.0);
    CHECK(log_mean(0, 5) == 0.0);
    CHECK(log_mean(5, 0) == 0.0);
    CHECK(log_mean(0, 0) == 0.0);
    CHECK(log_mean(4, 2) == doctest::Approx(log_mean_quadrature(4, 2)).epsilon(1e-10));
    CHECK(log_mean(4, 2) == doctest::Approx(2.885390).epsilon(1e-6));
    CHECK_THROWS_AS(log_mean(-1, 2), DomainError);

    // quadrature oracle across scales, including the series band
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(1e-4, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double u = uni(rng), v = uni(rng);
        CHECK(log_mean(u, v) ==
              doctest::Approx(log_mean_quadrature(u, v)).epsilon(1e-9));
        const double w = u * (1.0 + 1e-10);
        CHECK(log_mean(u, w) == doctest::Approx(u).epsilon(1e-9));
    }
}

TEST_CASE("logarithmic mean properties: symmetry, homogeneity, monotonicity, bound") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> uni(0.0, 4.0);
    std::uniform_real_distribution<double> lam(0.01, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double u = uni(rng), v = uni(rng), l = lam(rng);
        CHECK(log_mean(u, v) == doctest::Approx(log_mean(v, u)).epsilon(1e-12));
        CHECK(log_mean(l * u, l * v) == doctest::Approx(l * log_mean(u, v)).epsilon(1e-12));
        const double u2 = u + uni(rng);
        CHECK(log_mean(u, v) <= log_mean(u2, v) + 1e-14);
        CHECK(log_mean(u, v) <= 0.5 * (u + v) + 1e-14);
        if (u > 0 && v > 0) {
            CHECK(log_mean(u, v) >= std::min(u, v) - 1e-14);
            CHECK(log_mean(u, v) <= std::max(u, v) + 1e-14);
        }
    }
}

TEST_CASE("logarithmic mean derivative: diagonal, finite differences, Euler identity") {
    CHECK(log_mean_d1(3, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(log_mean_d1(0, 1), DomainError);

    const double euler42 = log_mean_d1(4, 2) * 4 + log_mean_d1(2, 4) * 2;
    CHECK(euler42 == doctest::Approx(2.885390).epsilon(1e-6));

    CHECK(log_mean_d1(1.0, std::exp(1.0)) ==
          doctest::Approx(log_mean_fd(1.0, std::exp(1.0))).epsilon(1e-5));

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(0.05, 6.0);
    for (int i = 0; i < 1000; ++i) {
        const double u = uni(rng), v = uni(rng);
        const double euler = log_mean_d1(u, v) * u + log_mean_d1(v, u) * v - log_mean(u, v);
        CHECK(std::abs(euler) <= 1e-8);
        // concavity inequality at independent evaluation points
        const double s = uni(rng), t = uni(rng);
        CHECK(log_mean_d1(s, t) * u + log_mean_d1(t, s) * v >= log_mean(u, v) - 1e-9);
        // derivative against the finite-difference oracle
        CHECK(log_mean_d1(u, v) == doctest::Approx(log_mean_fd(u, v)).epsilon(2e-5));
    }
}

TEST_CASE("alpha: conventions, convexity, affine rays") {
    CHECK(alpha(0, 0, 0) == 0.0);
    CHECK(std::isinf(alpha(1, 0, 3)));
    CHECK(alpha(2, 4, 2) == doctest::Approx(4.0 / log_mean_quadrature(4, 2)).epsilon(1e-7));
    CHECK(alpha(2, 4, 2) == doctest::Approx(1.38629).epsilon(1e-5));
    CHECK_THROWS_AS(alpha(1, -1, 1), DomainError);

    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> mass(1e-3, 4.0);
    std::uniform_real_distribution<double> flux(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double v1 = flux(rng), s1 = mass(rng), t1 = mass(rng);
        const double v2 = flux(rng), s2 = mass(rng), t2 = mass(rng);
        const double mid = alpha(0.5 * (v1 + v2), 0.5 * (s1 + s2), 0.5 * (t1 + t2));
        CHECK(mid <= 0.5 * (alpha(v1, s1, t1) + alpha(v2, s2, t2)) + 1e-10);

        // exactly affine along rays Z2 = kappa Z1
        const double kappa = 0.2 + mass(rng);
        const double tmix = 0.3;
        const double scale = 1.0 - tmix + tmix * kappa;
        const double interp = (1 - tmix) * alpha(v1, s1, t1) +
                              tmix * alpha(kappa * v1, kappa * s1, kappa * t1);
        CHECK(alpha(scale * v1, scale * s1, scale * t1) ==
              doctest::Approx(interp).epsilon(1e-10));
    }
}

TEST_CASE("gradient and divergence on the reference chain") {
    const auto chain = reference_chain();
    Vec psi(2);
    psi << 0, 1;
    const EdgeField g = gradient(psi, chain);
    CHECK(g(0, 1) == 1.0);
    CHECK(g(1, 0) == -1.0);
    CHECK(gradient(Vec::Constant(2, 3.7), chain).cwiseAbs().maxCoeff() == 0.0);

    EdgeField Psi = EdgeField::Zero(2, 2);
    Psi(0, 1) = 1.0;
    Psi(1, 0) = -1.0;
    const Vec div = divergence(Psi, chain);
    CHECK(div(0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(div(1) == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(pair_node(div, Vec::Ones(2), chain) == doctest::Approx(0.0).epsilon(1e-15));

    // symmetric fields have vanishing divergence
    EdgeField sym = EdgeField::Zero(2, 2);
    sym(0, 1) = sym(1, 0) = 2.5;
    CHECK(divergence(sym, chain).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient on a three-state chain, explicit values") {
    const auto chain = random_reversible_chain(3, 21);  // complete support
    Vec psi(3);
    psi << 1, 4, 2;
    const EdgeField g = gradient(psi, chain);
    CHECK(g(0, 1) == 3.0);
    CHECK(g(1, 2) == -2.0);
    CHECK(g(0, 2) == 1.0);
    CHECK(g(1, 0) == -3.0);
    CHECK(g(2, 1) == 2.0);
    CHECK(g(2, 0) == -1.0);
}

TEST_CASE("pairings: normalization, adjointness, explicit edge value") {
    const auto chain = reference_chain();
    CHECK(pair_node(Vec::Ones(2), Vec::Ones(2), chain) == doctest::Approx(1.0).epsilon(1e-15));

    EdgeField Psi = EdgeField::Zero(2, 2);
    Psi(0, 1) = 1.0;
    Psi(1, 0) = -1.0;
    CHECK(pair_edge(Psi, Psi, chain) == doctest::Approx(0.4 / 3.0).epsilon(1e-12));

    std::mt19937_64 rng(22);
    for (std::uint64_t seed : {31u, 32u}) {
        const auto ch = random_reversible_chain(4, seed);
        for (int i = 0; i < 100; ++i) {
            const Vec psi = random_vector(4, rng);
            const EdgeField F = random_canonical_field(ch, rng);
            const double lhs = pair_edge(gradient(psi, ch), F, ch);
            const double rhs = -pair_node(psi, divergence(F, ch), ch);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            CHECK(std::abs(pair_node(divergence(F, ch), Vec::Ones(4), ch)) <= 1e-12);
        }
    }
}

TEST_CASE("mobility matrix and the weighted seminorm") {
    const auto chain = reference_chain();
    Vec mu(2);
    mu << 2, 2;
    CHECK(mobility(mu).values(0, 1) == 2.0);
    mu << 0, 5;
    CHECK(mobility(mu).values(0, 1) == 0.0);
    mu << 4, 2;
    CHECK(mobility(mu).values(0, 1) == doctest::Approx(2.885390).epsilon(1e-6));
    CHECK(mobility(mu).values(0, 1) == mobility(mu).values(1, 0));

    Vec psi(2);
    psi << 0, 1;
    Vec even(2);
    even << 2, 2;
    CHECK(edge_norm_sq(gradient(psi, chain), even, chain) ==
          doctest::Approx(4.0 / 15.0).epsilon(1e-10));
    CHECK(edge_norm_sq(gradient(psi, chain), Vec::Zero(2), chain) == 0.0);
    CHECK(edge_norm_sq(EdgeField::Zero(2, 2), even, chain) == 0.0);
}
