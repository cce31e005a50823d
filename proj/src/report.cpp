#include "vortexlab/report.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vortexlab/product_space.hpp"
#include "vortexlab/selftest.hpp"
#include "vortexlab/snapshot.hpp"

namespace vortexlab {

namespace {

double require_tau(const ExperimentConfig& cfg) {
  if (!cfg.tau) throw Error(ErrorCode::ConfigError, "[run] tau is required for this command");
  return *cfg.tau;
}

Json manifold_json(const AffineTorus& M) {
  return {{"n", M.dim()}, {"N", M.grid()->points_per_axis()}, {"nu", M.nu()}, {"volume", M.volume()}};
}

Json metric_summary(const MetricField& h) {
  return {{"min_eigenvalue", h.min_eigenvalue()}, {"max_eigenvalue", h.max_eigenvalue()}};
}

std::optional<MetricField> warm_start(const ExperimentConfig& cfg, const FlatBundle& B, const AffineTorus& M) {
  if (cfg.warm_start.empty()) return std::nullopt;
  return read_snapshot(cfg.warm_start, B, M.grid());
}

CommandOutcome flow_outcome(Json report, FlowResult result, bool converged) {
  CommandOutcome out;
  out.exit_code = converged ? 0 : 2;
  report["diagnostics"] = to_json(result.diagnostics);
  report["metric"] = metric_summary(result.metric);
  out.report = std::move(report);
  out.diagnostics = std::move(result.diagnostics);
  out.metric = std::move(result.metric);
  return out;
}

CommandOutcome run_degree(const ExperimentConfig& cfg) {
  const TorusPtr M = cfg.torus();
  const FlatBundle B = cfg.bundle();
  CommandOutcome out;
  out.report = {{"command", "degree"},
                {"manifold", manifold_json(*M)},
                {"rank", B.rank()},
                {"degree", degree(B, *M)},
                {"slope", slope(B, *M)},
                {"gauduchon_residual", gauduchon_residual(*M)}};
  return out;
}

CommandOutcome run_stability(const ExperimentConfig& cfg) {
  const TorusPtr M = cfg.torus();
  const FlatBundle B = cfg.bundle();
  CommandOutcome out;
  out.report = {{"command", "stability"},
                {"manifold", manifold_json(*M)},
                {"rank", B.rank()},
                {"stable", to_json(is_stable_flat(B, *M))},
                {"polystable", to_json(is_polystable_flat(B, *M))}};
  if (cfg.phi && cfg.tau) {
    const FlatPair P = cfg.pair();
    const double tau_hat = *cfg.tau * M->volume() / 2.0;
    out.report["tau"] = *cfg.tau;
    out.report["tau_hat"] = tau_hat;
    out.report["tau_stable"] = to_json(is_tau_stable(P, tau_hat, *M));
    out.report["tau_polystable"] = to_json(is_tau_polystable(P, tau_hat, *M));
  }
  return out;
}

CommandOutcome run_vortex(const ExperimentConfig& cfg, const CheckpointFn& checkpoint) {
  const TorusPtr M = cfg.torus();
  const FlatPair P = cfg.pair();
  const double tau = require_tau(cfg);
  const double tau_hat = tau * M->volume() / 2.0;
  Json report = {{"command", "solve-vortex"},
                 {"manifold", manifold_json(*M)},
                 {"rank", P.bundle.rank()},
                 {"tau", tau},
                 {"tau_hat", tau_hat},
                 {"stability", to_json(is_tau_polystable(P, tau_hat, *M))}};
  try {
    FlowResult result = solve_vortex(P, tau, *M, cfg.solver, warm_start(cfg, P.bundle, *M), checkpoint);
    report["bradlow_gap"] = bradlow_identity_gap(P, result.metric, tau, *M);
    return flow_outcome(std::move(report), std::move(result), true);
  } catch (const NonConvergenceError& e) {
    report["bradlow_gap"] = bradlow_identity_gap(P, e.last().metric, tau, *M);
    report["residual_floor"] = e.last().diagnostics.final_residual;
    return flow_outcome(std::move(report), e.last(), false);
  }
}

CommandOutcome run_he(const ExperimentConfig& cfg, const CheckpointFn& checkpoint) {
  const TorusPtr M = cfg.torus();
  const FlatBundle B = cfg.bundle();
  Json report = {{"command", "solve-he"},
                 {"manifold", manifold_json(*M)},
                 {"rank", B.rank()},
                 {"degree", degree(B, *M)},
                 {"polystable", to_json(is_polystable_flat(B, *M))}};
  try {
    return flow_outcome(std::move(report), solve_hermitian_einstein(B, *M, cfg.solver, warm_start(cfg, B, *M), checkpoint),
                        true);
  } catch (const NonConvergenceError& e) {
    report["residual_floor"] = e.last().diagnostics.final_residual;
    return flow_outcome(std::move(report), e.last(), false);
  }
}

CommandOutcome run_reduction(const ExperimentConfig& cfg, const CheckpointFn& checkpoint) {
  const TorusPtr M = cfg.torus();
  const FlatPair P = cfg.pair();
  const double tau = require_tau(cfg);
  const ProjectiveGridPtr pg = make_projective_grid(cfg.p1_degree);

  SigmaTau st = sigma_from_tau(P, tau, *M);
  if (cfg.sigma) st.sigma = *cfg.sigma;
  Calibration cal;
  if (cfg.fs_scale) {
    cal = {cfg.alpha_scale, *cfg.fs_scale, NAN};
  } else {
    cal = calibrate_reduction(M, pg);
  }
  const ReductionSetup R = make_reduction_setup(M, pg, st.sigma, cal.alpha_scale, P);

  Json report = {{"command", "verify-reduction"},
                 {"manifold", manifold_json(*M)},
                 {"rank", P.bundle.rank()},
                 {"tau", tau},
                 {"tau_hat", st.tau_hat},
                 {"sigma", st.sigma},
                 {"p1_degree", cfg.p1_degree},
                 {"calibration",
                  {{"alpha_scale", {cal.alpha_scale.real(), cal.alpha_scale.imag()}},
                   {"fs_scale", cal.c},
                   {"residual", std::isnan(cal.residual) ? Json(nullptr) : Json(cal.residual)}}}};

  DegreeOptions none;
  report["degrees"] = {{"pullback_E", degree_sigma(DegreeKind::pullback_E, R, none)},
                       {"pullback_TP1", degree_sigma(DegreeKind::pullback_V, R, none)},
                       {"F", degree_sigma(DegreeKind::F, R, none)}};
  report["volume_sigma"] = volume_sigma(R);

  const PartialConnection F = build_F(R);
  report["partial_curvature"] = partial_curvature(F);
  report["round_trip_error"] = (extract_phi(F).v - P.phi.v).norm();

  FlowResult result = [&] {
    try {
      return solve_vortex(P, tau, *M, cfg.solver, warm_start(cfg, P.bundle, *M), checkpoint);
    } catch (const NonConvergenceError& e) {
      return e.last();
    }
  }();
  const bool converged = result.diagnostics.converged;
  MetricField h = result.metric;
  if (cfg.perturbation != 0.0) {
    EndField H = h.H();
    for (std::size_t p = 0; p < H.size(); ++p)
      H[p] *= std::exp(cfg.perturbation * std::sin(2.0 * std::numbers::pi * M->grid()->coordinate(p, 0)));
    h = MetricField(P.bundle, M->grid(), std::move(H));
  }
  report["perturbation"] = cfg.perturbation;
  report["vortex_residual"] = h_norm_sup(h, vortex_residual(P, h, tau, *M));
  const HEResidual he = he_residual_on_X(induced_metric_on_F(h, cal.c), R);
  report["gamma"] = he.gamma;
  report["he_residual"] = he.residual;
  return flow_outcome(std::move(report), std::move(result), converged);
}

CommandOutcome run_selftest_command(const ExperimentConfig& cfg) {
  CommandOutcome out;
  Json items = Json::array();
  bool all = true;
  for (const auto& item : run_selftest(cfg.seed)) {
    items.push_back({{"name", item.name}, {"value", item.value}, {"threshold", item.threshold}, {"passed", item.passed}});
    all = all && item.passed;
  }
  out.report = {{"command", "selftest"}, {"seed", cfg.seed}, {"items", items}, {"passed", all}};
  out.exit_code = all ? 0 : 1;
  return out;
}

}  // namespace

std::string report_schema_version() { return "1.0.0"; }

Json to_json(const CMat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const StabilityVerdict& v) {
  Json witnesses = Json::array();
  for (const auto& w : v.witnesses) witnesses.push_back({{"role", w.role}, {"slope", w.slope}, {"basis", to_json(w.basis)}});
  return {{"verdict", std::string(to_string(v.verdict))}, {"complete", v.complete}, {"witnesses", witnesses}};
}

Json to_json(const FlowDiagnostics& d) {
  return {{"converged", d.converged},
          {"iterations", d.iterations},
          {"final_residual", d.final_residual},
          {"final_l2_residual", d.l2_residual.empty() ? 0.0 : d.l2_residual.back()},
          {"gamma", d.gamma},
          {"reason", d.reason}};
}

std::string trace_csv(const FlowDiagnostics& d) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,sup_residual,l2_residual\n";
  for (std::size_t k = 0; k < d.sup_residual.size(); ++k) out << k << ',' << d.sup_residual[k] << ',' << d.l2_residual[k] << '\n';
  return out.str();
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

CommandOutcome run_command(const std::string& command, const ExperimentConfig& cfg, const CheckpointFn& checkpoint) {
  CommandOutcome out;
  if (command == "degree")
    out = run_degree(cfg);
  else if (command == "stability")
    out = run_stability(cfg);
  else if (command == "solve-vortex")
    out = run_vortex(cfg, checkpoint);
  else if (command == "solve-he")
    out = run_he(cfg, checkpoint);
  else if (command == "verify-reduction")
    out = run_reduction(cfg, checkpoint);
  else if (command == "selftest")
    out = run_selftest_command(cfg);
  else
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  out.report["schema_version"] = report_schema_version();
  out.report["exit_code"] = out.exit_code;
  return out;
}

}  // namespace vortexlab
