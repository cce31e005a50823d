#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "vortexlab/config.hpp"
#include "vortexlab/stability.hpp"

namespace vortexlab {

using Json = nlohmann::json;

std::string report_schema_version();

Json to_json(const CMat& m);
Json to_json(const StabilityVerdict& v);
/// Scalar diagnostics only; the per-iteration traces go to CSV.
Json to_json(const FlowDiagnostics& d);

/// "iteration,sup_residual,l2_residual" rows.
std::string trace_csv(const FlowDiagnostics& d);
/// Pretty-printed with sorted keys and a trailing newline; byte-stable across runs.
std::string dump_report(const Json& report);

struct CommandOutcome {
  int exit_code = 0;  // 0 success, 2 non-convergence
  Json report;
  std::optional<FlowDiagnostics> diagnostics;
  std::optional<MetricField> metric;
};

/// Runs one of: degree, stability, solve-vortex, solve-he, verify-reduction, selftest.
/// Input and numerical errors propagate as Error; NonConvergence becomes exit code 2.
CommandOutcome run_command(const std::string& command, const ExperimentConfig& cfg, const CheckpointFn& checkpoint = {});

}  // namespace vortexlab
