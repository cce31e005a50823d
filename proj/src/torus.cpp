#include "vortexlab/torus.hpp"

#include <cmath>

namespace vortexlab {

const GridFunction& ExteriorField::at(unsigned I) const {
  for (std::size_t i = 0; i < masks.size(); ++i)
    if (masks[i] == I) return coeffs[i];
  throw Error(ErrorCode::WrongDegree, "multi-index does not match exterior degree");
}

AffineTorus::AffineTorus(int n, Eigen::MatrixXd g, int grid_points, double nu) : n_(n), g_(std::move(g)), nu_(nu) {
  if (n < 1 || n > 2) throw Error(ErrorCode::InvalidArgument, "torus dimension must be 1 or 2");
  if (g_.rows() != n || g_.cols() != n) throw Error(ErrorCode::NonSPDMetric, "metric must be n×n");
  if ((g_ - g_.transpose()).norm() > 1e-14 * (1.0 + g_.norm()))
    throw Error(ErrorCode::NonSPDMetric, "metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g_);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw Error(ErrorCode::NonSPDMetric, "metric is not positive definite");
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "volume coefficient must be positive");
  if (grid_points < 8 || grid_points % 2 != 0) throw Error(ErrorCode::BadGrid, "grid size must be even and >= 8");
  ginv_ = g_.inverse();
  grid_ = std::make_shared<const Grid>(n, grid_points);
}

FormField AffineTorus::omega() const {
  FormField w(calc(), 1, 1);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) w.at(1u << i, 1u << j) = GridFunction(grid_, g_(i, j));
  return w;
}

double AffineTorus::volume() const { return integrate(wedge_power(omega(), n_), *this); }

double AffineTorus::volume_density() const {
  const ExteriorField top = divide_by_nu(wedge_power(omega(), n_), nu_);
  return top.coeffs.front()[0].real();
}

TorusPtr make_torus(int n, const Eigen::MatrixXd& g, int grid_points, double nu) {
  return std::make_shared<const AffineTorus>(n, g, grid_points, nu);
}

FormField constant_form(const TorusCalc& calc, int k, int l, unsigned I, unsigned J, cplx value) {
  FormField f(calc, k, l);
  f.at(I, J) = GridFunction(calc.grid, value);
  return f;
}

ExteriorField divide_by_nu(const FormField& f, double nu) {
  const int n = f.dims();
  const unsigned full = (1u << n) - 1;
  const double sign = ((n * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0) / nu;
  ExteriorField out;
  if (f.k() == n) {
    out.degree = f.l();
    for (unsigned J : f.second_masks()) {
      out.masks.push_back(J);
      out.coeffs.push_back(sign * f.at(full, J));
    }
  } else if (f.l() == n) {
    out.degree = f.k();
    for (unsigned I : f.first_masks()) {
      out.masks.push_back(I);
      out.coeffs.push_back(sign * f.at(I, full));
    }
  } else {
    throw Error(ErrorCode::WrongDegree, "division by nu needs a full-degree factor");
  }
  return out;
}

double integrate(const FormField& f, const AffineTorus& M) {
  const int n = M.dim();
  if (f.k() != n || f.l() != n) throw Error(ErrorCode::WrongDegree, "integration needs an (n,n) form");
  const ExteriorField top = divide_by_nu(f, M.nu());
  // The fundamental domain [0,1)^n has unit coordinate volume.
  return top.at((1u << n) - 1).mean().real();
}

double gauduchon_residual(const AffineTorus& M) {
  const FormField p = wedge_power(M.omega(), M.dim() - 1);
  return del(delbar(p)).sup_norm();
}

GridFunction trace_g(const FormField& f, const AffineTorus& M) {
  if (f.k() != 1 || f.l() != 1) throw Error(ErrorCode::WrongDegree, "trace_g needs a (1,1) form");
  GridFunction out(M.grid());
  const auto& ginv = M.inverse_metric();
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < M.dim(); ++j) out += cplx(ginv(i, j)) * f.at(1u << i, 1u << j);
  return out;
}

}  // namespace vortexlab
