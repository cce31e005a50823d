#pragma once

#include <functional>

#include "vortexlab/flat_bundle.hpp"
#include "vortexlab/forms.hpp"
#include "vortexlab/torus.hpp"

namespace vortexlab {

/// Pointwise r×r matrices on a grid (sections of End E in the log frame).
using EndField = std::vector<CMat>;

/// Coefficient calculus for End E-valued forms.
struct EndCalc {
  using Coeff = EndField;
  using Scalar = cplx;

  GridPtr grid;
  int rank = 1;

  int dims() const { return grid->dim(); }
  Coeff zero() const { return EndField(grid->size(), CMat::Zero(rank, rank)); }
  Coeff one() const { return EndField(grid->size(), CMat::Identity(rank, rank)); }
  Coeff holo(const Coeff& f, int i) const;
  Coeff anti(const Coeff& f, int j) const;
  Coeff mul(const Coeff& a, const Coeff& b) const;
  Coeff scale(const Coeff& a, cplx s) const;
  double sup_norm(const Coeff& a) const;
};

using EndForm = Form<EndCalc>;

/// Entrywise spectral derivative of a matrix field.
EndField partial(const Grid& grid, const EndField& f, int axis);
double sup_norm(const EndField& f);
EndField operator+(const EndField& a, const EndField& b);
EndField operator-(const EndField& a, const EndField& b);
EndField operator*(cplx s, const EndField& a);
GridFunction trace(const GridPtr& grid, const EndField& f);

/// Hermitian metric on a flat bundle, stored in the periodic log-frame gauge:
/// the flat-frame metric is h(x) = G(x)^* H(x) G(x) with G(x) = exp(Σ x^i L_i).
class MetricField {
 public:
  /// Throws SingularMetric if some H(x) is not Hermitian positive definite.
  MetricField(FlatBundle bundle, GridPtr grid, EndField H);

  static MetricField constant(FlatBundle bundle, GridPtr grid, const CMat& value);
  static MetricField from(FlatBundle bundle, GridPtr grid, const std::function<CMat(double, double)>& f);

  const FlatBundle& bundle() const { return bundle_; }
  const GridPtr& grid() const { return grid_; }
  const EndField& H() const { return H_; }
  int rank() const { return bundle_.rank(); }

  /// Flat-frame matrix h(x) = G^* H G at grid point `index`.
  CMat flat_frame(std::size_t index) const;
  /// Smallest eigenvalue of H over the grid.
  double min_eigenvalue() const;
  double max_eigenvalue() const;

 private:
  FlatBundle bundle_;
  GridPtr grid_;
  EndField H_;
};

/// θ = ½ H⁻¹(∂_i H + L_i^* H + H L_i) dx^i, the log-frame image of h⁻¹∂h.
EndForm ext_connection_form(const MetricField& h);
/// R = ∂̄θ in the log frame: R_ij = −½(∂_j θ_i + [θ_i, L_j]).
EndForm ext_curvature(const MetricField& h);
/// K = Σ g^{ij} R_ij.
EndField mean_curvature(const MetricField& h, const AffineTorus& M);
/// −∂∂̄ log det H.
FormField first_chern(const MetricField& h);
/// ∫ c₁ ∧ ω^{n−1}/ν.
double degree(const MetricField& h, const AffineTorus& M);
/// Degree computed with the identity metric in the log frame.
double degree(const FlatBundle& B, const AffineTorus& M);
/// deg/rank; ZeroRank for rank 0.
double slope(const FlatBundle& B, const AffineTorus& M);
/// sup |(tr K) ω^n − n c₁ ∧ ω^{n−1}| as (n,n) coefficients.
double chern_trace_check(const MetricField& h, const AffineTorus& M);
/// sup ‖H K − (H K)^*‖.
double self_adjointness_defect(const MetricField& h, const EndField& K);

}  // namespace vortexlab
