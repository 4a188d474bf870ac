#pragma once

#include <string>
#include <vector>

#include "acst/metrics.hpp"
#include "acst/scenario.hpp"

namespace acst {

struct RunOptions {
  bool trace = false;
};

struct RunOutput {
  MetricsReport report;
  std::vector<std::string> trace_lines;  // populated when options.trace
};

// Deterministic, incompressible test payload; a pure function of (size, seed).
std::vector<std::uint8_t> generate_file(std::uint64_t size, std::uint64_t seed);

// Executes the scenario's phases in order on a fresh simulator. Phase
// failures stop the sequence but still produce a (partial) report.
RunOutput run_scenario(const Scenario& scenario, std::uint64_t seed,
                       const RunOptions& options = {});

// One run per value with derived seeds (seed + index). Bandwidth sweeps
// rewrite the default link bandwidth and report the least value whose join
// succeeded; delay sweeps rewrite the default link delay.
SweepResult sweep(const Scenario& base, const std::string& parameter,
                  const std::vector<double>& values);

}  // namespace acst
