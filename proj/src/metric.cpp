#include "vortexlab/metric.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace vortexlab {

EndField partial(const Grid& grid, const EndField& f, int axis) {
  const std::size_t size = f.size();
  const Eigen::Index r = size ? f.front().rows() : 0;
  EndField out(size, CMat::Zero(r, r));
  std::vector<cplx> column(size);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) {
      for (std::size_t p = 0; p < size; ++p) column[p] = f[p](a, b);
      const std::vector<cplx> d = grid.derivative(column, axis);
      for (std::size_t p = 0; p < size; ++p) out[p](a, b) = d[p];
    }
  return out;
}

double sup_norm(const EndField& f) {
  double m = 0.0;
  for (const CMat& a : f) m = std::max(m, a.cwiseAbs().maxCoeff());
  return m;
}

EndField operator+(const EndField& a, const EndField& b) {
  EndField out(a);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] += b[p];
  return out;
}

EndField operator-(const EndField& a, const EndField& b) {
  EndField out(a);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] -= b[p];
  return out;
}

EndField operator*(cplx s, const EndField& a) {
  EndField out(a);
  for (CMat& m : out) m *= s;
  return out;
}

GridFunction trace(const GridPtr& grid, const EndField& f) {
  GridFunction out(grid);
  for (std::size_t p = 0; p < f.size(); ++p) out[p] = f[p].trace();
  return out;
}

EndCalc::Coeff EndCalc::holo(const Coeff& f, int i) const { return 0.5 * partial(*grid, f, i); }
EndCalc::Coeff EndCalc::anti(const Coeff& f, int j) const { return 0.5 * partial(*grid, f, j); }

EndCalc::Coeff EndCalc::mul(const Coeff& a, const Coeff& b) const {
  EndField out(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) out[p] = a[p] * b[p];
  return out;
}

EndCalc::Coeff EndCalc::scale(const Coeff& a, cplx s) const { return s * a; }
double EndCalc::sup_norm(const Coeff& a) const { return vortexlab::sup_norm(a); }

MetricField::MetricField(FlatBundle bundle, GridPtr grid, EndField H)
    : bundle_(std::move(bundle)), grid_(std::move(grid)), H_(std::move(H)) {
  if (H_.size() != grid_->size()) throw Error(ErrorCode::InvalidArgument, "metric size does not match grid");
  for (const CMat& m : H_) {
    if (m.rows() != bundle_.rank() || m.cols() != bundle_.rank())
      throw Error(ErrorCode::InvalidArgument, "metric matrix size does not match rank");
    if (!m.allFinite()) throw Error(ErrorCode::SingularMetric, "metric has non-finite entries");
    if ((m - m.adjoint()).norm() > 1e-12 * (1.0 + m.norm()))
      throw Error(ErrorCode::SingularMetric, "metric is not Hermitian");
  }
  if (!(min_eigenvalue() > 0.0)) throw Error(ErrorCode::SingularMetric, "metric is not positive definite");
}

MetricField MetricField::constant(FlatBundle bundle, GridPtr grid, const CMat& value) {
  const std::size_t size = grid->size();
  return MetricField(std::move(bundle), std::move(grid), EndField(size, value));
}

MetricField MetricField::from(FlatBundle bundle, GridPtr grid, const std::function<CMat(double, double)>& f) {
  EndField H(grid->size());
  for (std::size_t p = 0; p < H.size(); ++p) {
    const auto x = grid->point(p);
    H[p] = f(x[0], x[1]);
  }
  return MetricField(std::move(bundle), std::move(grid), std::move(H));
}

CMat MetricField::flat_frame(std::size_t index) const {
  const auto x = grid_->point(index);
  const CMat G = bundle_.frame(std::span<const double>(x.data(), std::size_t(grid_->dim())));
  return G.adjoint() * H_[index] * G;
}

double MetricField::min_eigenvalue() const {
  double m = INFINITY;
  for (const CMat& a : H_) m = std::min(m, Eigen::SelfAdjointEigenSolver<CMat>(a, Eigen::EigenvaluesOnly).eigenvalues()(0));
  return m;
}

double MetricField::max_eigenvalue() const {
  double m = -INFINITY;
  for (const CMat& a : H_) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(a, Eigen::EigenvaluesOnly);
    m = std::max(m, eig.eigenvalues()(a.rows() - 1));
  }
  return m;
}

namespace {

std::vector<EndField> connection_components(const MetricField& h) {
  const Grid& grid = *h.grid();
  const int n = grid.dim();
  std::vector<EndField> theta;
  EndField inv(h.H().size());
  for (std::size_t p = 0; p < inv.size(); ++p) inv[p] = h.H()[p].inverse();
  for (int i = 0; i < n; ++i) {
    const CMat& L = h.bundle().logs()[std::size_t(i)];
    EndField dH = partial(grid, h.H(), i);
    EndField t(dH.size());
    for (std::size_t p = 0; p < t.size(); ++p)
      t[p] = 0.5 * inv[p] * (dH[p] + L.adjoint() * h.H()[p] + h.H()[p] * L);
    theta.push_back(std::move(t));
  }
  return theta;
}

// R_ij for all i, j, indexed i*n + j.
std::vector<EndField> curvature_components(const MetricField& h) {
  const Grid& grid = *h.grid();
  const int n = grid.dim();
  const std::vector<EndField> theta = connection_components(h);
  std::vector<EndField> R;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const CMat& L = h.bundle().logs()[std::size_t(j)];
      EndField d = partial(grid, theta[std::size_t(i)], j);
      for (std::size_t p = 0; p < d.size(); ++p) {
        const CMat& t = theta[std::size_t(i)][p];
        d[p] = -0.5 * (d[p] + t * L - L * t);
      }
      R.push_back(std::move(d));
    }
  return R;
}

void require_dims(const MetricField& h) {
  if (h.bundle().dim() != h.grid()->dim())
    throw Error(ErrorCode::InvalidArgument, "bundle and grid have different base dimensions");
}

}  // namespace

EndForm ext_connection_form(const MetricField& h) {
  require_dims(h);
  EndForm theta(EndCalc{h.grid(), h.rank()}, 1, 0);
  auto comps = connection_components(h);
  for (int i = 0; i < h.grid()->dim(); ++i) theta.at(1u << i, 0) = std::move(comps[std::size_t(i)]);
  return theta;
}

EndForm ext_curvature(const MetricField& h) {
  require_dims(h);
  const int n = h.grid()->dim();
  EndForm R(EndCalc{h.grid(), h.rank()}, 1, 1);
  auto comps = curvature_components(h);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R.at(1u << i, 1u << j) = std::move(comps[std::size_t(i * n + j)]);
  return R;
}

EndField mean_curvature(const MetricField& h, const AffineTorus& M) {
  require_dims(h);
  const int n = M.dim();
  const auto comps = curvature_components(h);
  EndField K(h.H().size(), CMat::Zero(h.rank(), h.rank()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double gij = M.inverse_metric()(i, j);
      for (std::size_t p = 0; p < K.size(); ++p) K[p] += gij * comps[std::size_t(i * n + j)][p];
    }
  return K;
}

FormField first_chern(const MetricField& h) {
  require_dims(h);
  GridFunction logdet(h.grid());
  for (std::size_t p = 0; p < logdet.size(); ++p) logdet[p] = std::log(h.H()[p].determinant().real());
  FormField u(TorusCalc{h.grid()}, 0, 0);
  u.at(0, 0) = logdet;
  return del(delbar(u)).scaled(-1.0);
}

double degree(const MetricField& h, const AffineTorus& M) {
  const FormField c1 = first_chern(h);
  return integrate(wedge(c1, wedge_power(M.omega(), M.dim() - 1)), M);
}

double degree(const FlatBundle& B, const AffineTorus& M) {
  if (B.rank() == 0) return 0.0;
  return degree(MetricField::constant(B, M.grid(), CMat::Identity(B.rank(), B.rank())), M);
}

double slope(const FlatBundle& B, const AffineTorus& M) {
  if (B.rank() == 0) throw Error(ErrorCode::ZeroRank, "slope of a rank zero bundle");
  return degree(B, M) / B.rank();
}

double chern_trace_check(const MetricField& h, const AffineTorus& M) {
  const int n = M.dim();
  const GridFunction trK = trace(h.grid(), mean_curvature(h, M));
  FormField lhs = wedge_power(M.omega(), n);
  const unsigned full = (1u << n) - 1;
  lhs.at(full, full) *= trK;
  FormField rhs = wedge(first_chern(h), wedge_power(M.omega(), n - 1)).scaled(double(n));
  return (lhs - rhs).sup_norm();
}

double self_adjointness_defect(const MetricField& h, const EndField& K) {
  double m = 0.0;
  for (std::size_t p = 0; p < K.size(); ++p) {
    const CMat hk = h.H()[p] * K[p];
    m = std::max(m, (hk - hk.adjoint()).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace vortexlab
