#include <doctest.h>

#include "generators.hpp"
#include "vortexlab/flow.hpp"

using namespace vortexlab;

namespace {

CMat jordan2(cplx lam) {
  CMat m(2, 2);
  m << lam, 1.0, 0.0, lam;
  return m;
}

CVec e1(int r) {
  CVec v = CVec::Zero(r);
  v(0) = 1.0;
  return v;
}

double max_deviation(const MetricField& h, double value) {
  double worst = 0.0;
  for (const CMat& H : h.H()) worst = std::max(worst, (H - value * CMat::Identity(H.rows(), H.cols())).norm());
  return worst;
}

}  // namespace

TEST_CASE("trivial pair converges to tau / |phi|^2 from above and below") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 32, 1.0);
  for (double phi_abs : {1.0, 2.0})
    for (double tau : {0.5, 2.0, 5.0})
      for (double start : {1.0, 100.0}) {
        CAPTURE(phi_abs);
        CAPTURE(tau);
        CAPTURE(start);
        const FlatPair P = make_flat_pair(trivial_bundle(1, 1), CVec::Constant(1, phi_abs));
        SolverConfig cfg;
        cfg.init_scale = start;
        cfg.tol = 1e-10;
        const FlowResult res = solve_vortex(P, tau, *M, cfg);
        CHECK(res.diagnostics.converged);
        CHECK(res.diagnostics.final_residual < 1e-10);
        CHECK(max_deviation(res.metric, tau / (phi_abs * phi_abs)) < 1e-8);
        CHECK(std::abs(bradlow_identity_gap(P, res.metric, tau, *M)) < 1e-9);
        CHECK(max_deviation(trivial_pair_solution(phi_abs, tau, *M), tau / (phi_abs * phi_abs)) < 1e-15);
      }
}

TEST_CASE("trivial pair on the two-torus with a skew metric") {
  const TorusPtr M = make_torus(2, Eigen::Matrix2d{{1.0, 0.3}, {0.3, 1.5}}, 16, 1.0);
  const FlatPair P = make_flat_pair(trivial_bundle(2, 1), e1(1));
  SolverConfig cfg;
  cfg.init_scale = 0.2;
  const FlowResult res = solve_vortex(P, 3.0, *M, cfg);
  CHECK(res.diagnostics.converged);
  CHECK(max_deviation(res.metric, 3.0) < 1e-7);
}

TEST_CASE("Bradlow gap equals the integrated trace of the vortex residual for any metric") {
  const TorusPtr M = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 32, 1.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const FlatBundle B = gen::bundle(2, 2, gen::Family::diagonalizable, rng);
    // Append a trivial summand so the pair has a flat section.
    const FlatPair P = make_flat_pair(direct_sum(trivial_bundle(2, 1), B), e1(3));
    const MetricField h = random_metric(P.bundle, M->grid(), rng);
    const double tau = gen::uniform(rng, -3.0, 3.0);
    CHECK(std::abs(bradlow_identity_gap(P, h, tau, *M) - integrated_trace(vortex_residual(P, h, tau, *M), *M)) < 1e-8);
  }
}

TEST_CASE("Jordan pair does not converge and reports a positive floor") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  const FlatPair P = make_flat_pair(make_flat_bundle({jordan2(1.0)}), e1(2));
  SolverConfig cfg;
  cfg.max_iters = 3000;
  try {
    solve_vortex(P, 2.0, *M, cfg);
    FAIL("expected NonConvergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK_FALSE(e.last().diagnostics.converged);
    CHECK(e.last().diagnostics.final_residual > 1e-6);
  }
}

TEST_CASE("Hermitian-Einstein flow: polystable converges, Jordan stalls") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  for (const CMat& rho : {CMat(Eigen::Vector2cd(2.0, 3.0).asDiagonal()), CMat(CMat::Constant(1, 1, 2.0))}) {
    SolverConfig cfg;
    const FlowResult res = solve_hermitian_einstein(make_flat_bundle({rho}), *M, cfg);
    CHECK(res.diagnostics.converged);
    CHECK(std::abs(res.diagnostics.gamma) < 1e-12);
    CHECK(res.diagnostics.final_residual < 1e-8);
  }
  SolverConfig cfg;
  cfg.max_iters = 4000;
  try {
    solve_hermitian_einstein(make_flat_bundle({jordan2(1.0)}), *M, cfg);
    FAIL("expected NonConvergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.last().diagnostics.final_residual > 10 * cfg.tol);
  }
}

TEST_CASE("warm start from a solution converges immediately") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  const FlatPair P = make_flat_pair(trivial_bundle(1, 1), e1(1));
  const FlowResult res = solve_vortex(P, 2.0, *M, SolverConfig{}, trivial_pair_solution(1.0, 2.0, *M));
  CHECK(res.diagnostics.converged);
  CHECK(res.diagnostics.iterations <= 1);
}

TEST_CASE("checkpoints fire at the requested cadence") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  const FlatPair P = make_flat_pair(trivial_bundle(1, 1), e1(1));
  SolverConfig cfg;
  cfg.checkpoint_every = 25;
  std::vector<int> seen;
  const FlowResult res =
      solve_vortex(P, 2.0, *M, cfg, std::nullopt, [&](int it, const MetricField&) { seen.push_back(it); });
  REQUIRE_FALSE(seen.empty());
  for (int it : seen) CHECK(it % 25 == 0);
  CHECK(int(seen.size()) == res.diagnostics.iterations / 25);
}

TEST_CASE("solver configuration and trivial-pair preconditions") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  SolverConfig bad;
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  SolverConfig bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(bad_tol.validate(), Error);
  CHECK_THROWS_AS(trivial_pair_solution(1.0, -2.0, *M), Error);
}
