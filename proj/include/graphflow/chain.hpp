#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "graphflow/errors.hpp"

// Markov-chain and measure core: validation, stationary distribution,
// reference direction, JSON (de)serialization.

namespace graphflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A nonnegative density over the state set. Plain vector plus the
// nonnegativity predicate; pairs of these are the endpoints of every
// transport problem in this library.
using Measure = Vec;

inline bool is_nonnegative(const Measure& mu) { return (mu.array() >= 0.0).all(); }
inline bool is_strictly_positive(const Measure& mu) { return (mu.array() > 0.0).all(); }

// Finite reversible Markov chain with a fixed positive reference
// direction p and cost weights a (source) and b (transport).
//
// Invariants established at construction:
//   - K row-stochastic (1e-12) and irreducible on its support graph,
//   - pi stationary for K (residual <= 1e-10), strictly positive,
//   - detailed balance pi(x)K(x,y) == pi(y)K(y,x) (1e-10),
//   - p strictly positive with sum_x p(x)pi(x) == 1 (1e-10).
struct MarkovChain {
    int n = 0;
    Mat K;
    Vec pi;
    Vec p;
    double a = 1.0;
    double b = 1.0;
    std::vector<std::string> states;

    bool has_edge(int x, int y) const { return K(x, y) > 0.0; }
};

// Tolerances used when validating a chain.
inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kStationaryTol = 1e-10;
inline constexpr double kReversibleTol = 1e-10;
inline constexpr double kReferenceTol = 1e-10;

// Stationary distribution of a row-stochastic irreducible kernel.
// Direct linear solve with a normalization row for n <= 64, power
// iteration above that. Throws NotStochastic / NotIrreducible.
Vec stationary_distribution(const Mat& K);

// Builds and fully validates a chain from its raw parts. If `pi` has
// size 0 the stationary distribution is computed. If normalize_p is set,
// p is rescaled to unit pi-weighted mass instead of being rejected.
MarkovChain make_chain(const Mat& K, const Vec& pi, const Vec& p, double a, double b,
                       bool normalize_p = false, std::vector<std::string> states = {});

// Parses a chain JSON document:
//   { "states": [...], "K": [[...],...], "pi": [...]?, "p": [...]?,
//     "a": 1.0?, "b": 1.0?, "normalize_p": false? }
// Defaults: p uniform-in-density (all ones, valid when <1,1>_pi = 1 holds,
// i.e. always), a = b = 1.
MarkovChain load_chain(const std::string& json_text);
MarkovChain load_chain_file(const std::string& path);

// Serializes a chain back to the same schema. load_chain(serialize(c))
// reproduces every field bit-for-bit.
std::string serialize_chain(const MarkovChain& chain);

// Total mass sum_x mu(x) pi(x).
double total_mass(const Measure& mu, const MarkovChain& chain);

// Parses a measure from a JSON array ("[0.6, 0.8]") or an inline
// comma-separated list ("0.6,0.8"). Length must match chain.n.
Measure parse_measure(const std::string& text, const MarkovChain& chain);
Measure load_measure_file(const std::string& path, const MarkovChain& chain);

}  // namespace graphflow
