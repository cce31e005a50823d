#include "vortexlab/random_fields.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace vortexlab {

GridFunction random_grid_function(const GridPtr& grid, Rng& rng, int modes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int k1max = grid->dim() == 2 ? modes : 0;
  GridFunction f(grid);
  for (int k0 = -modes; k0 <= modes; ++k0)
    for (int k1 = -k1max; k1 <= k1max; ++k1) {
      const cplx c(normal(rng), normal(rng));
      const double decay = 1.0 / (1.0 + k0 * k0 + k1 * k1);
      for (std::size_t p = 0; p < f.size(); ++p) {
        const auto x = grid->point(p);
        const double phase = 2.0 * std::numbers::pi * (k0 * x[0] + k1 * x[1]);
        f[p] += decay * c * std::polar(1.0, phase);
      }
    }
  return f;
}

FormField random_form(const TorusCalc& calc, int k, int l, Rng& rng, int modes) {
  FormField f(calc, k, l);
  for (unsigned I : f.first_masks())
    for (unsigned J : f.second_masks()) f.at(I, J) = random_grid_function(calc.grid, rng, modes);
  return f;
}

MetricField random_metric(const FlatBundle& bundle, const GridPtr& grid, Rng& rng, double amplitude, int modes) {
  const int r = bundle.rank();
  std::vector<std::vector<GridFunction>> entries{static_cast<std::size_t>(r)};
  for (auto& row : entries) row.resize(std::size_t(r));
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) entries[std::size_t(a)][std::size_t(b)] = random_grid_function(grid, rng, modes);
  double scale = 0.0;
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) scale = std::max(scale, entries[std::size_t(a)][std::size_t(b)].sup_norm());
  EndField H(grid->size());
  for (std::size_t p = 0; p < H.size(); ++p) {
    CMat A(r, r);
    for (int a = 0; a < r; ++a) {
      A(a, a) = entries[std::size_t(a)][std::size_t(a)][p].real();
      for (int b = a + 1; b < r; ++b) {
        A(a, b) = entries[std::size_t(a)][std::size_t(b)][p];
        A(b, a) = std::conj(A(a, b));
      }
    }
    A *= amplitude / scale;
    Eigen::SelfAdjointEigenSolver<CMat> eig(A);
    const CMat& U = eig.eigenvectors();
    CMat m = U * eig.eigenvalues().array().exp().matrix().cast<cplx>().asDiagonal() * U.adjoint();
    H[p] = 0.5 * (m + m.adjoint());
  }
  return MetricField(bundle, grid, std::move(H));
}

}  // namespace vortexlab
