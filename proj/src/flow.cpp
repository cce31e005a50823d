#include "vortexlab/flow.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace vortexlab {

namespace {

struct Split {
  CMat sqrt;
  CMat inv_sqrt;
};

Split split(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(H);
  const auto& d = eig.eigenvalues();
  const CMat& U = eig.eigenvectors();
  return {U * d.cwiseSqrt().cast<cplx>().asDiagonal() * U.adjoint(),
          U * d.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * U.adjoint()};
}

CMat hermitian_exp(const CMat& S) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(S);
  const CMat& U = eig.eigenvectors();
  return U * eig.eigenvalues().array().exp().matrix().cast<cplx>().asDiagonal() * U.adjoint();
}

// Symmetrized residual S = H^{½} V H^{−½}, Hermitian whenever H V is.
EndField symmetrize(const MetricField& h, const EndField& V, std::vector<Split>* roots = nullptr) {
  EndField S(V.size());
  if (roots) roots->resize(V.size());
  for (std::size_t p = 0; p < V.size(); ++p) {
    Split s = split(h.H()[p]);
    CMat m = s.sqrt * V[p] * s.inv_sqrt;
    S[p] = 0.5 * (m + m.adjoint());
    if (roots) (*roots)[p] = std::move(s);
  }
  return S;
}

double spectral_norm(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

using ResidualFn = std::function<EndField(const MetricField&)>;

FlowResult run_flow(const FlatBundle& B, const AffineTorus& M, const SolverConfig& cfg,
                    const std::optional<MetricField>& initial, const CheckpointFn& checkpoint,
                    const ResidualFn& residual, double gamma) {
  cfg.validate();
  const Grid& grid = *M.grid();
  const int r = B.rank();
  MetricField h = initial ? *initial : MetricField::constant(B, M.grid(), cfg.init_scale * CMat::Identity(r, r));
  if (h.grid()->size() != grid.size() || h.rank() != r)
    throw Error(ErrorCode::InvalidArgument, "initial metric does not match bundle and grid");

  // Fourier preconditioner 1/(1 + ½dt|k|²_g) damps the stiff Laplacian modes of K.
  const Eigen::MatrixXd& ginv = M.inverse_metric();
  const double dt = cfg.dt;
  const auto symbol = [&](int k0, int k1) {
    const double a = 2.0 * std::numbers::pi * k0;
    const double b = 2.0 * std::numbers::pi * k1;
    double k2 = ginv(0, 0) * a * a;
    if (M.dim() == 2) k2 += 2.0 * ginv(0, 1) * a * b + ginv(1, 1) * b * b;
    return 1.0 / (1.0 + 0.5 * dt * k2);
  };

  FlowDiagnostics diag;
  diag.gamma = gamma;
  std::vector<cplx> column(grid.size());
  for (int iter = 0;; ++iter) {
    std::vector<Split> roots;
    const EndField S = symmetrize(h, residual(h), &roots);
    double sup = 0.0, sum = 0.0;
    for (const CMat& s : S) {
      sup = std::max(sup, spectral_norm(s));
      sum += s.squaredNorm();
    }
    if (!std::isfinite(sup)) throw Error(ErrorCode::StepUnstable, "flow produced a non-finite residual; reduce dt");
    diag.sup_residual.push_back(sup);
    diag.l2_residual.push_back(std::sqrt(sum / double(S.size())));
    diag.final_residual = sup;
    diag.iterations = iter;

    if (sup <= cfg.tol) {
      diag.converged = true;
      diag.reason = "converged";
      return {std::move(h), std::move(diag)};
    }
    const auto fail = [&](const std::string& reason, const std::string& what) {
      diag.reason = reason;
      throw NonConvergenceError(what, FlowResult{h, diag});
    };
    if (iter >= cfg.max_iters) fail("max_iters", "iteration cap reached");
    if (iter >= cfg.stall_window && sup > 0.99 * diag.sup_residual[std::size_t(iter - cfg.stall_window)])
      fail("stall", "residual stalled");

    EndField D(S.size(), CMat::Zero(r, r));
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        for (std::size_t p = 0; p < S.size(); ++p) column[p] = S[p](a, b);
        const std::vector<cplx> smooth = grid.apply_multiplier(column, symbol);
        for (std::size_t p = 0; p < S.size(); ++p) D[p](a, b) = smooth[p];
      }
    EndField next(S.size());
    for (std::size_t p = 0; p < S.size(); ++p) {
      const CMat E = hermitian_exp(-2.0 * dt * 0.5 * (D[p] + D[p].adjoint()));
      CMat m = roots[p].sqrt * E * roots[p].sqrt;
      next[p] = 0.5 * (m + m.adjoint());
      if (!next[p].allFinite()) throw Error(ErrorCode::StepUnstable, "flow produced a non-finite metric; reduce dt");
    }
    h = MetricField(B, M.grid(), std::move(next));
    const double lo = h.min_eigenvalue(), hi = h.max_eigenvalue();
    if (lo < 1e-12 || hi > 1e12) fail("degenerate", "metric degenerates along the flow");

    if (checkpoint && cfg.checkpoint_every > 0 && (iter + 1) % cfg.checkpoint_every == 0) checkpoint(iter + 1, h);
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
  if (stall_window < 1) throw Error(ErrorCode::InvalidArgument, "stall_window must be at least 1");
  if (checkpoint_every < 0) throw Error(ErrorCode::InvalidArgument, "checkpoint_every must be non-negative");
  if (!(init_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "init_scale must be positive");
}

EndField phi_phi_star(const FlatSection& phi, const MetricField& h) {
  if (phi.v.norm() == 0.0) throw Error(ErrorCode::ZeroSection, "phi is zero");
  EndField out(h.H().size());
  const CMat outer = phi.v * phi.v.adjoint();
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = outer * h.H()[p];
  return out;
}

EndField vortex_residual(const FlatPair& P, const MetricField& h, double tau, const AffineTorus& M) {
  EndField V = mean_curvature(h, M);
  const EndField pp = phi_phi_star(P.phi, h);
  const CMat shift = 0.5 * tau * CMat::Identity(h.rank(), h.rank());
  for (std::size_t p = 0; p < V.size(); ++p) V[p] += 0.5 * pp[p] - shift;
  return V;
}

FlowResult solve_vortex(const FlatPair& P, double tau, const AffineTorus& M, const SolverConfig& cfg,
                        const std::optional<MetricField>& initial, const CheckpointFn& checkpoint) {
  if (P.phi.v.norm() == 0.0) throw Error(ErrorCode::ZeroSection, "phi is zero");
  return run_flow(P.bundle, M, cfg, initial, checkpoint,
                  [&](const MetricField& h) { return vortex_residual(P, h, tau, M); }, 0.5 * tau);
}

FlowResult solve_hermitian_einstein(const FlatBundle& B, const AffineTorus& M, const SolverConfig& cfg,
                                    const std::optional<MetricField>& initial, const CheckpointFn& checkpoint) {
  if (B.rank() < 1) throw Error(ErrorCode::ZeroRank, "rank must be positive");
  const double gamma = M.dim() * slope(B, M) / M.volume();
  return run_flow(B, M, cfg, initial, checkpoint,
                  [&](const MetricField& h) {
                    EndField K = mean_curvature(h, M);
                    for (CMat& k : K) k -= gamma * CMat::Identity(B.rank(), B.rank());
                    return K;
                  },
                  gamma);
}

MetricField trivial_pair_solution(double phi_abs, double tau, const AffineTorus& M) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveTau, "the trivial pair is tau-stable only for tau > 0");
  if (!(phi_abs > 0.0)) throw Error(ErrorCode::ZeroSection, "|phi| must be positive");
  return MetricField::constant(trivial_bundle(M.dim(), 1), M.grid(), CMat::Constant(1, 1, tau / (phi_abs * phi_abs)));
}

double integrated_trace(const EndField& V, const AffineTorus& M) {
  GridFunction t = trace(M.grid(), V);
  return t.mean().real() * M.volume_density();
}

double bradlow_identity_gap(const FlatPair& P, const MetricField& h, double tau, const AffineTorus& M) {
  GridFunction norm(M.grid());
  for (std::size_t p = 0; p < norm.size(); ++p) norm[p] = (P.phi.v.adjoint() * h.H()[p] * P.phi.v)(0, 0);
  const double phi_term = 0.5 * norm.mean().real() * M.volume_density();
  return M.dim() * degree(h, M) + phi_term - 0.5 * tau * P.bundle.rank() * M.volume();
}

double h_norm_sup(const MetricField& h, const EndField& V) {
  double sup = 0.0;
  for (const CMat& s : symmetrize(h, V)) sup = std::max(sup, spectral_norm(s));
  return sup;
}

}  // namespace vortexlab
