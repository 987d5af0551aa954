#pragma once

#include <string>

#include "graphflow/duality.hpp"
#include "graphflow/geodesic.hpp"

// Deterministic, schema-versioned JSON/CSV emission. Identical inputs and
// seed produce byte-identical files.

namespace graphflow {

inline constexpr int kSchemaVersion = 1;

std::string solve_report_to_json(const SolveReport& report, const MarkovChain& chain,
                                 const std::string& metric);
std::string ray_manifest_to_json(const std::vector<RayResult>& rays, const MarkovChain& chain);
std::string ray_to_csv(const RayResult& ray, const MarkovChain& chain);
std::string gap_report_to_json(const GapReport& gap, const MarkovChain& chain);
std::string certificate_to_csv(const DualCertificate& cert, const MarkovChain& chain);

void write_file(const std::string& path, const std::string& content);

}  // namespace graphflow
