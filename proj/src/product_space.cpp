#include "vortexlab/product_space.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace vortexlab {

namespace {

constexpr double kPi = std::numbers::pi;

double pnu_sign(int n) { return (n * (n + 1) / 2) % 2 == 0 ? 1.0 : -1.0; }

// Second-factor mask (bit n = dw̄) as an exterior mask (bit n+1 = dw̄).
unsigned second_to_exterior(unsigned J, int n) {
  const unsigned low = J & ((1u << n) - 1);
  return (J & (1u << n)) ? (low | (1u << (n + 1))) : low;
}

SeparableField lift(const GridFunction& f) { return SeparableField(f, SphereFunction(1.0)); }

CMat hermitian_sqrt(const CMat& H, bool inverse) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(H);
  Eigen::VectorXd d = eig.eigenvalues().cwiseSqrt();
  if (inverse) d = d.cwiseInverse();
  return eig.eigenvectors() * d.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

void XForm::add(unsigned mask, const SeparableField& f, double sign) {
  auto it = comps.find(mask);
  if (it == comps.end())
    comps.emplace(mask, cplx(sign) * f);
  else
    it->second += cplx(sign) * f;
}

double XForm::sup_norm(const ProjectiveGrid& pg) const {
  double m = 0.0;
  for (const auto& [mask, f] : comps) m = std::max(m, f.sup_norm(pg));
  return m;
}

XForm exterior_d(const XForm& f) {
  XForm out{f.n, f.degree + 1, {}};
  const int n = f.n;
  for (const auto& [mask, c] : f.comps)
    for (int bit = 0; bit < n + 2; ++bit) {
      if (mask & (1u << bit)) continue;
      const SeparableField d = bit < n ? c.d_x(bit) : (bit == n ? c.d_w() : c.d_wbar());
      out.add(mask | (1u << bit), d, mask::prepend_sign(bit, mask));
    }
  return out;
}

XForm operator-(const XForm& a, const XForm& b) {
  XForm out = a;
  for (const auto& [mask, c] : b.comps) out.add(mask, c, -1.0);
  return out;
}

XForm scaled(const XForm& f, cplx s) {
  XForm out{f.n, f.degree, {}};
  for (const auto& [mask, c] : f.comps) out.comps.emplace(mask, s * c);
  return out;
}

cplx integrate_top(const XForm& f, const ProjectiveGrid& pg) {
  if (f.degree != f.n + 2) throw Error(ErrorCode::WrongDegree, "integration on X needs a top-degree form");
  const auto it = f.comps.find((1u << (f.n + 2)) - 1);
  if (it == f.comps.end()) return 0.0;
  return cplx(0.0, -2.0) * it->second.integrate(pg);
}

ReductionSetup make_reduction_setup(TorusPtr M, ProjectiveGridPtr pg, double sigma, cplx alpha_scale, FlatPair pair) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive, got " + std::to_string(sigma));
  if (alpha_scale == 0.0) throw Error(ErrorCode::InvalidArgument, "alpha_scale must be nonzero");
  if (pair.bundle.dim() != M->dim()) throw Error(ErrorCode::InvalidArgument, "pair and torus dimensions differ");
  return ReductionSetup{std::move(M), std::move(pg), sigma, alpha_scale, std::move(pair)};
}

ProductCalc product_calc(const AffineTorus& M, ProjectiveGridPtr pg) { return ProductCalc{M.grid(), std::move(pg), M.dim()}; }

SphereFunction fs_weight() { return SphereFunction::mono(1.0, 0, 0, 2); }

ProductForm pullback(const FormField& f, const ProductCalc& calc) {
  ProductForm out(calc, f.k(), f.l());
  for (unsigned I : f.first_masks())
    for (unsigned J : f.second_masks()) out.at(I, J) = lift(f.at(I, J));
  return out;
}

ProductForm omega_sigma(const AffineTorus& M, ProjectiveGridPtr pg, double sigma) {
  const ProductCalc calc = product_calc(M, std::move(pg));
  ProductForm out = pullback(M.omega(), calc);
  const int n = M.dim();
  out.at(1u << n, 1u << n) = SeparableField(GridFunction(M.grid(), 1.0), cplx(sigma / (2.0 * kPi)) * fs_weight());
  return out;
}

ProductForm omega_sigma(const ReductionSetup& R) { return omega_sigma(*R.M, R.pg, R.sigma); }

XForm divide_by_pnu_second_full(const ProductForm& f, double nu) {
  const int n = f.dims() - 1;
  if (f.l() != n + 1) throw Error(ErrorCode::WrongDegree, "division needs full second degree");
  const unsigned full = (1u << (n + 1)) - 1;
  XForm out{n, f.k() + 1, {}};
  const cplx factor = cplx(0.0, pnu_sign(n) / nu);
  // χ ⊗ (p*ν ∧ dw̄) ↦ s χ ∧ (i dw̄); dw̄ is the highest exterior index.
  for (unsigned I : f.first_masks()) out.add(I | (1u << (n + 1)), factor * f.at(I, full), 1.0);
  return out;
}

XForm divide_by_pnu_first_full(const ProductForm& f, double nu) {
  const int n = f.dims() - 1;
  if (f.k() != n + 1) throw Error(ErrorCode::WrongDegree, "division needs full first degree");
  const unsigned full = (1u << (n + 1)) - 1;
  XForm out{n, f.l() + 1, {}};
  const cplx factor = cplx(0.0, -pnu_sign(n) / nu);
  // (p*ν ∧ dw) ⊗ χ ↦ −s χ ∧ (i dw).
  for (unsigned J : f.second_masks()) {
    const unsigned ext = second_to_exterior(J, n);
    out.add(ext | (1u << n), factor * f.at(full, J), mask::concat_sign(ext, 1u << n));
  }
  return out;
}

XForm divide_by_pnu(const ProductForm& f, double nu) {
  const int n = f.dims() - 1;
  if (f.l() == n + 1) return divide_by_pnu_second_full(f, nu);
  if (f.k() == n + 1) return divide_by_pnu_first_full(f, nu);
  throw Error(ErrorCode::WrongDegree, "division by p*nu needs a full-degree factor");
}

cplx integrate_over_X(const ProductForm& f, double nu, const ProjectiveGrid& pg) {
  const int n = f.dims() - 1;
  if (f.k() != n + 1 || f.l() != n + 1) throw Error(ErrorCode::WrongDegree, "integration needs an (n+1,n+1) form");
  return integrate_top(divide_by_pnu(f, nu), pg);
}

double volume_sigma(const ReductionSetup& R) {
  return integrate_over_X(wedge_power(omega_sigma(R), R.M->dim() + 1), R.M->nu(), *R.pg).real();
}

double gauduchon_residual_X(const ReductionSetup& R) {
  return del(delbar(wedge_power(omega_sigma(R), R.M->dim()))).sup_norm();
}

std::pair<double, double> volume_density_range(const ReductionSetup& R) {
  const int n = R.M->dim();
  const XForm top = divide_by_pnu(wedge_power(omega_sigma(R), n + 1), R.M->nu());
  const auto it = top.comps.find((1u << (n + 2)) - 1);
  if (it == top.comps.end()) return {0.0, 0.0};
  double lo = INFINITY, im = 0.0;
  for (cplx v : it->second.evaluate(*R.pg)) {
    const cplx density = cplx(0.0, -2.0) * v;
    lo = std::min(lo, density.real());
    im = std::max(im, std::abs(density.imag()));
  }
  return {lo, im};
}

IntPartsResult int_parts_check(const ProductForm& chi, double nu) {
  const int n = chi.dims() - 1;
  const XForm reference = exterior_d(divide_by_pnu(chi, nu));
  XForm lhs, rhs;
  if (chi.k() == n && chi.l() == n + 1) {
    lhs = divide_by_pnu(del(chi), nu);
    rhs = scaled(reference, 0.5);
  } else if (chi.k() == n + 1 && chi.l() == n) {
    lhs = divide_by_pnu(delbar(chi), nu);
    rhs = scaled(reference, (n + 1) % 2 == 0 ? 0.5 : -0.5);
  } else {
    throw Error(ErrorCode::WrongDegree, "int_parts_check needs an (n,n+1) or (n+1,n) form");
  }
  return {integrate_top(lhs, *chi.calc().pg), (lhs - rhs).sup_norm(*chi.calc().pg)};
}

SphereFunction alpha_section(const ReductionSetup& R) { return R.alpha_scale * fs_weight(); }

PartialConnection build_F_from_section(const ReductionSetup& R, const std::vector<CVec>& psi) {
  const GridPtr& grid = R.M->grid();
  if (psi.size() != grid->size()) throw Error(ErrorCode::InvalidArgument, "section samples do not match grid");
  PartialConnection F{R.pair.bundle, grid, R.pg, R.alpha_scale, {}};
  const std::vector<cplx> alpha = R.pg->sample(alpha_section(R));
  F.beta.resize(grid->size() * R.pg->size());
  for (std::size_t q = 0; q < R.pg->size(); ++q)
    for (std::size_t p = 0; p < grid->size(); ++p) F.beta[p + grid->size() * q] = psi[p] * alpha[q];
  return F;
}

PartialConnection build_F(const ReductionSetup& R) {
  // Rejects zero or non-flat φ.
  const FlatPair checked = make_flat_pair(R.pair.bundle, R.pair.phi.v);
  return build_F_from_section(R, std::vector<CVec>(R.M->grid()->size(), checked.phi.v));
}

FlatSection extract_phi(const PartialConnection& F) {
  const std::size_t G = F.grid->size();
  const std::size_t Q = F.pg->size();
  const std::vector<cplx> alpha = F.pg->sample(F.alpha_scale * fs_weight());
  double norm2 = 0.0;
  for (cplx a : alpha) norm2 += std::norm(a);

  std::vector<CVec> psi(G);
  double worst = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < G; ++p) {
    CVec num = CVec::Zero(F.bundle.rank());
    for (std::size_t q = 0; q < Q; ++q) num += std::conj(alpha[q]) * F.beta[p + G * q];
    psi[p] = num / norm2;
    for (std::size_t q = 0; q < Q; ++q) {
      worst = std::max(worst, (F.beta[p + G * q] - psi[p] * alpha[q]).norm());
      scale = std::max(scale, F.beta[p + G * q].norm());
    }
  }
  if (worst > 1e-8 * std::max(1.0, scale)) throw Error(ErrorCode::NotInvariant, "beta is not proportional to alpha");

  const CVec phi = psi.front();
  for (const CVec& v : psi)
    if ((v - phi).norm() > 1e-8 * std::max(1.0, phi.norm()))
      throw Error(ErrorCode::NotFlatSection, "recovered section is not constant in the log frame");
  return make_flat_pair(F.bundle, phi).phi;
}

double partial_curvature(const PartialConnection& F) {
  const Grid& grid = *F.grid;
  const std::size_t G = grid.size();
  const int n = grid.dim();
  const int r = F.bundle.rank();
  double worst = 0.0;
  // E block: dA + A∧A with A = −Σ L_i dx^i.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const CMat& a = F.bundle.logs()[std::size_t(i)];
      const CMat& b = F.bundle.logs()[std::size_t(j)];
      worst = std::max(worst, (a * b - b * a).cwiseAbs().maxCoeff());
    }
  // Mixed (x^i, w̄) block: ∂_i β − L_i β.
  std::vector<cplx> column(G);
  for (std::size_t q = 0; q < F.pg->size(); ++q)
    for (int i = 0; i < n; ++i) {
      const CMat& L = F.bundle.logs()[std::size_t(i)];
      std::vector<CVec> dbeta(G, CVec::Zero(r));
      for (int a = 0; a < r; ++a) {
        for (std::size_t p = 0; p < G; ++p) column[p] = F.beta[p + G * q](a);
        const std::vector<cplx> d = grid.derivative(column, i);
        for (std::size_t p = 0; p < G; ++p) dbeta[p](a) = d[p];
      }
      for (std::size_t p = 0; p < G; ++p)
        worst = std::max(worst, (dbeta[p] - L * F.beta[p + G * q]).cwiseAbs().maxCoeff());
    }
  return worst;
}

ProductForm p1_chern_form(const ProductCalc& calc, int line_degree) {
  // −∂_w∂_w̄ log (1+|w|²)^{−p} = p ∂_w [w (1+|w|²)^{−1}].
  const SphereFunction c = cplx(double(line_degree)) * SphereFunction::mono(1.0, 1, 0, 1).d_w();
  ProductForm out(calc, 1, 1);
  out.at(1u << calc.n, 1u << calc.n) = SeparableField(GridFunction(calc.grid, 1.0), c);
  return out;
}

double degree_sigma(DegreeKind which, const ReductionSetup& R, const DegreeOptions& opt) {
  const AffineTorus& M = *R.M;
  const ProductCalc calc = product_calc(M, R.pg);
  const int r = R.pair.bundle.rank();
  const MetricField h =
      opt.metric ? *opt.metric : MetricField::constant(R.pair.bundle, M.grid(), CMat::Identity(r, r));
  ProductForm c1(calc, 1, 1);
  switch (which) {
    case DegreeKind::pullback_E: c1 = pullback(first_chern(h), calc); break;
    case DegreeKind::pullback_V: c1 = p1_chern_form(calc, opt.line_degree); break;
    case DegreeKind::F: c1 = pullback(first_chern(h), calc) + p1_chern_form(calc, 2); break;
  }
  return integrate_over_X(wedge(c1, wedge_power(omega_sigma(R), M.dim())), M.nu(), *R.pg)
      .real();
}

SigmaTau sigma_from_tau(const FlatPair& P, double tau, const AffineTorus& M) {
  const double vol = M.volume();
  const double tau_hat = tau * vol / 2.0;
  const int n = M.dim();
  const double denom = n * (P.bundle.rank() + 1) * tau_hat - n * degree(P.bundle, M);
  if (!(denom > 0.0))
    throw Error(ErrorCode::NonPositiveSigma, "sigma denominator n(r+1)tau_hat - n deg E = " + std::to_string(denom) +
                                                 " is not positive");
  return {4.0 * kPi * vol / denom, tau_hat};
}

InvariantProductMetric induced_metric_on_F(const MetricField& h, double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "FS block scale must be positive");
  return {h, c};
}

HEResidual he_residual_on_X(const InvariantProductMetric& Hm, const ReductionSetup& R) {
  const AffineTorus& M = *R.M;
  const MetricField& h = Hm.hE;
  const int r = h.rank();
  const std::size_t G = M.grid()->size();
  const double sigma = R.sigma;

  DegreeOptions opt;
  opt.metric = h;
  const double gamma = (M.dim() + 1) * degree_sigma(DegreeKind::F, R, opt) / ((r + 1) * volume_sigma(R));

  const EndField KE = mean_curvature(h, M);
  const EndField pp = phi_phi_star(R.pair.phi, h);
  std::vector<double> norm2(G);
  std::vector<CMat> root(G), inv_root(G);
  for (std::size_t p = 0; p < G; ++p) {
    norm2[p] = (R.pair.phi.v.adjoint() * h.H()[p] * R.pair.phi.v)(0, 0).real();
    root[p] = hermitian_sqrt(h.H()[p], false);
    inv_root[p] = hermitian_sqrt(h.H()[p], true);
  }
  const double a2 = std::norm(R.alpha_scale);

  double worst = 0.0;
  for (std::size_t q = 0; q < R.pg->size(); ++q) {
    const double rho = 1.0 / std::pow(1.0 + std::norm(R.pg->w[q]), 2);
    const double omega_ww = sigma / (2.0 * kPi) * rho;
    const double hT = Hm.c / sigma * rho;
    // Second fundamental form of the extension: |α|² measured by the block metric.
    const double coupling = a2 * rho * rho / hT;
    for (std::size_t p = 0; p < G; ++p) {
      const CMat K11 = KE[p] + (coupling / omega_ww) * pp[p] - gamma * CMat::Identity(r, r);
      const CMat S = root[p] * K11 * inv_root[p];
      Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (S + S.adjoint()), Eigen::EigenvaluesOnly);
      worst = std::max(worst, eig.eigenvalues().cwiseAbs().maxCoeff());
      const double K22 = (2.0 * rho - coupling * norm2[p]) / omega_ww - gamma;
      worst = std::max(worst, std::abs(K22));
    }
  }
  return {gamma, worst};
}

Calibration calibrate_reduction(TorusPtr M, ProjectiveGridPtr pg) {
  const FlatPair pair = make_flat_pair(trivial_bundle(M->dim(), 1), CVec::Ones(1));
  const double tau = 2.0;
  const SigmaTau st = sigma_from_tau(pair, tau, *M);
  const ReductionSetup R = make_reduction_setup(M, pg, st.sigma, 1.0, pair);
  const MetricField h = trivial_pair_solution(1.0, tau, *M);
  const auto residual = [&](double log_c) { return he_residual_on_X(induced_metric_on_F(h, std::exp(log_c)), R).residual; };

  // Golden-section search on log c.
  double a = std::log(1e-2), b = std::log(1e4);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = residual(x1), f2 = residual(x2);
  for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - g * (b - a); f1 = residual(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + g * (b - a); f2 = residual(x2);
    }
  }
  const double log_c = f1 < f2 ? x1 : x2;
  return {1.0, std::exp(log_c), std::min(f1, f2)};
}

}  // namespace vortexlab
