#include "vortexlab/selftest.hpp"

#include <cmath>
#include <numbers>

#include "vortexlab/flow.hpp"
#include "vortexlab/random_fields.hpp"

namespace vortexlab {

namespace {

SelfTestItem item(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, std::isfinite(value) && value <= threshold};
}

}  // namespace

std::vector<SelfTestItem> run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SelfTestItem> out;
  const TorusPtr M = make_torus(2, Eigen::Matrix2d{{1.0, 0.2}, {0.2, 1.5}}, 32, 1.0);
  const TorusCalc calc = M->calc();

  const FormField f = random_form(calc, 0, 0, rng);
  out.push_back(item("del_del_vanishes", del(del(random_form(calc, 0, 1, rng))).sup_norm(), 1e-9));
  out.push_back(item("del_delbar_anticommute", (del(delbar(f)) + delbar(del(f))).sup_norm(), 1e-9));
  out.push_back(item("gauduchon", gauduchon_residual(*M), 1e-10));

  const double theta = 2.0 * std::numbers::pi * 0.3;
  CMat A = CMat::Identity(2, 2);
  A(0, 0) = std::polar(1.0, theta);
  CMat Bm = CMat::Identity(2, 2);
  Bm(1, 1) = std::polar(2.0, 0.4);
  const FlatBundle B = make_flat_bundle({A, Bm});
  const MetricField h = random_metric(B, M->grid(), rng);
  out.push_back(item("chern_trace", chern_trace_check(h, *M), 1e-8));
  out.push_back(item("degree_metric_independent", std::abs(degree(h, *M) - degree(B, *M)), 1e-8));
  out.push_back(item("curvature_self_adjoint", self_adjointness_defect(h, mean_curvature(h, *M)), 1e-8));

  const TorusPtr M1 = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  const double tau = 3.0;
  const FlatPair P = make_flat_pair(trivial_bundle(1, 1), CVec::Constant(1, 1.0));
  const MetricField exact = trivial_pair_solution(1.0, tau, *M1);
  out.push_back(item("trivial_pair_residual", h_norm_sup(exact, vortex_residual(P, exact, tau, *M1)), 1e-10));
  out.push_back(item("bradlow_identity", std::abs(bradlow_identity_gap(P, exact, tau, *M1)), 1e-10));
  return out;
}

}  // namespace vortexlab
