#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphflow/chain.hpp"

// Acceptance battery: the eight release criteria, runnable from the CLI
// (`graphflow suite`) and from the test harness. Each criterion prints
// one pass/fail line; thresholds are pinned here, not configurable.

namespace graphflow {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance_suite(std::uint64_t seed = 0);
std::string suite_to_json(const std::vector<CriterionResult>& results);

// Shared instance factories (also used by the tests).
// Two-state reference instance used throughout the battery:
// K=[[0.8,0.2],[0.4,0.6]], pi=(2/3,1/3), p=(1,1), a=b=1.
MarkovChain reference_chain();
MarkovChain random_reversible_chain(int n, std::uint64_t seed);
Measure random_interior_measure(int n, std::uint64_t seed, double lo = 0.1, double hi = 1.5);

// min over c of ||diff - c p||_inf — distance of diff from span{p}.
double span_distance(const Vec& diff, const Vec& p);

}  // namespace graphflow
