#pragma once

#include <functional>
#include <optional>
#include <string>

#include "vortexlab/metric.hpp"

namespace vortexlab {

struct SolverConfig {
  double dt = 0.05;
  int max_iters = 20000;
  double tol = 1e-8;
  int stall_window = 2000;
  int checkpoint_every = 0;
  double init_scale = 1.0;  // initial metric init_scale·I unless a warm start is given

  void validate() const;
};

struct FlowDiagnostics {
  std::vector<double> sup_residual;
  std::vector<double> l2_residual;
  double final_residual = 0.0;
  double gamma = 0.0;  // HE constant, or τ/2 for the vortex flow
  bool converged = false;
  int iterations = 0;
  std::string reason;  // "converged", "stall", "max_iters", "degenerate"
};

struct FlowResult {
  MetricField metric;
  FlowDiagnostics diagnostics;
};

/// Raised when the flow stops without reaching the tolerance; keeps the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, FlowResult last)
      : Error(ErrorCode::NonConvergence, what), last_(std::move(last)) {}
  const FlowResult& last() const { return last_; }

 private:
  FlowResult last_;
};

using CheckpointFn = std::function<void(int iteration, const MetricField&)>;

/// s ↦ φ·h(s, φ), in the log frame the matrix φ φ^† H.
EndField phi_phi_star(const FlatSection& phi, const MetricField& h);

/// V = K + ½ φφ* − (τ/2) id.
EndField vortex_residual(const FlatPair& P, const MetricField& h, double tau, const AffineTorus& M);

/// Exponential heat flow for the τ-vortex equation.
FlowResult solve_vortex(const FlatPair& P, double tau, const AffineTorus& M, const SolverConfig& cfg,
                        const std::optional<MetricField>& initial = {}, const CheckpointFn& checkpoint = {});

/// Exponential heat flow for K = γ id with γ = n·μ/vol.
FlowResult solve_hermitian_einstein(const FlatBundle& B, const AffineTorus& M, const SolverConfig& cfg,
                                    const std::optional<MetricField>& initial = {},
                                    const CheckpointFn& checkpoint = {});

/// Constant metric τ/|φ|² on the trivial line bundle over M.
MetricField trivial_pair_solution(double phi_abs, double tau, const AffineTorus& M);

/// n·deg + ½∫|φ|²_h ω^n/ν − (τ/2)·r·vol.
double bradlow_identity_gap(const FlatPair& P, const MetricField& h, double tau, const AffineTorus& M);

/// ∫ tr V ω^n/ν.
double integrated_trace(const EndField& V, const AffineTorus& M);

/// sup_x of the spectral norm of H^{½} V H^{−½}.
double h_norm_sup(const MetricField& h, const EndField& V);

}  // namespace vortexlab
