#pragma once

#include <Eigen/Dense>
#include <memory>

#include "vortexlab/forms.hpp"
#include "vortexlab/grid.hpp"

namespace vortexlab {

/// Coefficient calculus on the torus: grid functions with spectral
/// derivatives; ∂ and ∂̄ both carry the ½ of the extended operators.
struct TorusCalc {
  using Coeff = GridFunction;
  using Scalar = cplx;

  GridPtr grid;

  int dims() const { return grid->dim(); }
  Coeff zero() const { return GridFunction(grid); }
  Coeff one() const { return GridFunction(grid, 1.0); }
  Coeff holo(const Coeff& f, int i) const { return 0.5 * f.partial(i); }
  Coeff anti(const Coeff& f, int j) const { return 0.5 * f.partial(j); }
  Coeff mul(const Coeff& a, const Coeff& b) const { return a * b; }
  Coeff scale(const Coeff& a, cplx s) const { return s * a; }
  double sup_norm(const Coeff& a) const { return a.sup_norm(); }
};

using FormField = Form<TorusCalc>;

/// Ordinary exterior form Σ c_I dx^I of a single degree.
struct ExteriorField {
  int degree = 0;
  std::vector<unsigned> masks;
  std::vector<GridFunction> coeffs;

  const GridFunction& at(unsigned I) const;
};

/// Flat torus R^n/Z^n with its standard affine structure, a constant metric g
/// and parallel volume form ν = nu·dx^1∧...∧dx^n.
class AffineTorus {
 public:
  AffineTorus(int n, Eigen::MatrixXd g, int grid_points, double nu);

  int dim() const { return n_; }
  const Eigen::MatrixXd& metric() const { return g_; }
  const Eigen::MatrixXd& inverse_metric() const { return ginv_; }
  double nu() const { return nu_; }
  const GridPtr& grid() const { return grid_; }
  TorusCalc calc() const { return TorusCalc{grid_}; }

  /// ω = Σ g_ij dx^i ⊗ dx^j.
  FormField omega() const;
  /// vol(M) = ∫ ω^n/ν.
  double volume() const;
  /// Pointwise ω^n/ν density (constant for constant g).
  double volume_density() const;

 private:
  int n_;
  Eigen::MatrixXd g_;
  Eigen::MatrixXd ginv_;
  double nu_;
  GridPtr grid_;
};

using TorusPtr = std::shared_ptr<const AffineTorus>;

TorusPtr make_torus(int n, const Eigen::MatrixXd& g, int grid_points, double nu);

/// Constant-coefficient form from a plain complex coefficient.
FormField constant_form(const TorusCalc& calc, int k, int l, unsigned I, unsigned J, cplx value);

/// Division by ν of an (n,l) or (k,n) form, sign (−1)^{n(n−1)/2}.
ExteriorField divide_by_nu(const FormField& f, double nu);

/// ∫_M f/ν for an (n,n) form.
double integrate(const FormField& f, const AffineTorus& M);

/// sup |∂∂̄(ω^{n−1})|.
double gauduchon_residual(const AffineTorus& M);

/// Σ g^{ij} f_{i,j} of a (1,1) form.
GridFunction trace_g(const FormField& f, const AffineTorus& M);

}  // namespace vortexlab
