#pragma once

#include <map>
#include <optional>

#include "vortexlab/flow.hpp"
#include "vortexlab/sphere.hpp"

namespace vortexlab {

/// Coefficient calculus on X = M×P¹ over the coordinates (x^1..x^n, w):
/// index n is dw in the first factor and dw̄ in the second. Both operators
/// carry the ½ in every direction.
struct ProductCalc {
  using Coeff = SeparableField;
  using Scalar = cplx;

  GridPtr grid;
  ProjectiveGridPtr pg;
  int n = 1;

  int dims() const { return n + 1; }
  Coeff zero() const { return SeparableField(grid); }
  Coeff one() const { return SeparableField(GridFunction(grid, 1.0), SphereFunction(1.0)); }
  Coeff holo(const Coeff& f, int i) const { return 0.5 * (i < n ? f.d_x(i) : f.d_w()); }
  Coeff anti(const Coeff& f, int j) const { return 0.5 * (j < n ? f.d_x(j) : f.d_wbar()); }
  Coeff mul(const Coeff& a, const Coeff& b) const { return a * b; }
  Coeff scale(const Coeff& a, cplx s) const { return s * a; }
  double sup_norm(const Coeff& a) const { return a.sup_norm(*pg); }
};

using ProductForm = Form<ProductCalc>;

/// Ordinary complex differential form on X in the coordinates
/// (x^1..x^n, w, w̄): bit n is dw and bit n+1 is dw̄.
struct XForm {
  int n = 1;
  int degree = 0;
  std::map<unsigned, SeparableField> comps;

  void add(unsigned mask, const SeparableField& f, double sign);
  double sup_norm(const ProjectiveGrid& pg) const;
};

XForm exterior_d(const XForm& f);
XForm operator-(const XForm& a, const XForm& b);
XForm scaled(const XForm& f, cplx s);
/// ∫_X of a top form; dw∧dw̄ = −2i du∧dv and the orientation is dx∧du∧dv.
cplx integrate_top(const XForm& f, const ProjectiveGrid& pg);

struct ReductionSetup {
  TorusPtr M;
  ProjectiveGridPtr pg;
  double sigma = 0.0;
  cplx alpha_scale = 1.0;
  FlatPair pair;
};

/// Validates σ > 0 (NonPositiveSigma) and alpha_scale ≠ 0.
ReductionSetup make_reduction_setup(TorusPtr M, ProjectiveGridPtr pg, double sigma, cplx alpha_scale, FlatPair pair);

ProductCalc product_calc(const AffineTorus& M, ProjectiveGridPtr pg);

/// (1+|w|²)^{−2}.
SphereFunction fs_weight();
/// Pullback to X of a (1,1) form on M.
ProductForm pullback(const FormField& f, const ProductCalc& calc);

/// Ω_σ = p*ω_M − √−1 σ q*ω_{P¹}; the P¹ block is (σ/2π)(1+|w|²)^{−2} dw⊗dw̄.
ProductForm omega_sigma(const ReductionSetup& R);
ProductForm omega_sigma(const AffineTorus& M, ProjectiveGridPtr pg, double sigma);

/// Division by p*ν of a (k, n+1) or (n+1, l) form.
XForm divide_by_pnu(const ProductForm& f, double nu);
/// The second division map, for an (n+1, l) form (used to cross-check the first on (n+1, n+1) forms).
XForm divide_by_pnu_first_full(const ProductForm& f, double nu);
XForm divide_by_pnu_second_full(const ProductForm& f, double nu);

/// ∫_X f/p*ν of an (n+1, n+1) form.
cplx integrate_over_X(const ProductForm& f, double nu, const ProjectiveGrid& pg);

/// Vol_σ(X) = ∫ Ω_σ^{n+1}/p*ν.
double volume_sigma(const ReductionSetup& R);
/// sup |∂∂̄(Ω_σ^n)|.
double gauduchon_residual_X(const ReductionSetup& R);
/// Smallest density of Ω_σ^{n+1}/p*ν against dx∧du∧dv, and the largest imaginary part.
std::pair<double, double> volume_density_range(const ReductionSetup& R);

struct IntPartsResult {
  cplx integral;      // ∫_X ∂χ/p*ν (or ∂̄χ/p*ν)
  double pointwise;   // sup of the difference to ±½ d(χ/p*ν)
};

/// Stokes-type identities for (n, n+1) and (n+1, n) forms.
IntPartsResult int_parts_check(const ProductForm& chi, double nu);

/// The SU(2)-invariant (0,1)-form with values in (T^{1,0}P¹)*: alpha_scale·(1+|w|²)^{−2} dw̄⊗dw.
SphereFunction alpha_section(const ReductionSetup& R);

/// Partial connection on F = p*E ⊕ q*TP¹ in the frame (log frame of E, ∂_w):
/// flat E block, holomorphic TP¹ block and the off-diagonal dw̄ coefficient β.
struct PartialConnection {
  FlatBundle bundle;
  GridPtr grid;
  ProjectiveGridPtr pg;
  cplx alpha_scale = 1.0;
  std::vector<CVec> beta;  // index p + grid.size()·q
};

PartialConnection build_F(const ReductionSetup& R);
/// β = p*ψ ⊗ α for an arbitrary (not necessarily flat) section ψ(x) given at the grid points.
PartialConnection build_F_from_section(const ReductionSetup& R, const std::vector<CVec>& psi);
/// Recovers φ; NotInvariant if β is not proportional to α, NotFlatSection if the result is not flat.
FlatSection extract_phi(const PartialConnection& F);
/// sup norm of the curvature of the partial connection.
double partial_curvature(const PartialConnection& F);

enum class DegreeKind { pullback_E, pullback_V, F };

struct DegreeOptions {
  std::optional<MetricField> metric;  // metric on E (identity in the log frame if absent)
  int line_degree = 2;                // V = O(line_degree) for pullback_V; 2 is TP¹
};

/// ∫_X c₁ ∧ Ω_σ^n / p*ν.
double degree_sigma(DegreeKind which, const ReductionSetup& R, const DegreeOptions& opt = {});

/// Chern form of q*O(p) with metric (1+|w|²)^{−p}: p(1+|w|²)^{−2} dw⊗dw̄.
ProductForm p1_chern_form(const ProductCalc& calc, int line_degree);

struct SigmaTau {
  double sigma = 0.0;
  double tau_hat = 0.0;
};

/// σ = 4π vol / (n(r+1)τ̂ − n deg E), τ̂ = τ vol/2; NonPositiveSigma when the denominator is ≤ 0.
SigmaTau sigma_from_tau(const FlatPair& P, double tau, const AffineTorus& M);

/// Block metric p*h ⊕ (c/σ)·(1+|w|²)^{−2} on F.
struct InvariantProductMetric {
  MetricField hE;
  double c = 1.0;
};

InvariantProductMetric induced_metric_on_F(const MetricField& h, double c);

struct HEResidual {
  double gamma = 0.0;
  double residual = 0.0;
};

/// Mean curvature of F on X against γ = (n+1) deg_σ(F) / (rank F · Vol_σ).
HEResidual he_residual_on_X(const InvariantProductMetric& Hm, const ReductionSetup& R);

struct Calibration {
  cplx alpha_scale = 1.0;
  double c = 0.0;
  double residual = 0.0;
};

/// Fixes alpha_scale = 1 and chooses c minimizing the trivial-pair residual at τ = 2.
Calibration calibrate_reduction(TorusPtr M, ProjectiveGridPtr pg);

}  // namespace vortexlab
