#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace vortexlab {

using cplx = std::complex<double>;

/// Uniform periodic grid on the unit torus [0,1)^n with FFT-based
/// trigonometric differentiation. Point index i = i_0 + N*i_1 (axis 0 fastest).
///
/// Plans are created once with FFTW_UNALIGNED so that execution is reentrant;
/// reductions run in index order, so results are bit-reproducible.
class Grid {
 public:
  Grid(int dim, int points_per_axis);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  std::size_t size() const { return size_; }

  /// Coordinate x^axis of grid point `index`.
  double coordinate(std::size_t index, int axis) const;
  std::array<double, 2> point(std::size_t index) const;

  /// Integer wavenumber of FFT slot `index` along `axis` (Nyquist reported as -N/2).
  int wavenumber(std::size_t index, int axis) const;

  /// Spectral derivative d/dx^axis of periodic samples; the Nyquist mode is dropped.
  std::vector<cplx> derivative(std::span<const cplx> values, int axis) const;

  /// Applies a Fourier multiplier m(k_0, k_1) (integer wavenumbers).
  std::vector<cplx> apply_multiplier(std::span<const cplx> values,
                                     const std::function<double(int, int)>& symbol) const;

  /// Trapezoidal mean over the fundamental domain (deterministic order).
  cplx mean(std::span<const cplx> values) const;

 private:
  void forward(const cplx* in, cplx* out) const;
  void backward(const cplx* in, cplx* out) const;

  int dim_;
  int n_;
  std::size_t size_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Complex scalar field sampled on a Grid.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid, cplx fill = 0.0);
  GridFunction(GridPtr grid, std::vector<cplx> values);

  static GridFunction from(GridPtr grid, const std::function<cplx(double, double)>& f);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  /// Plain partial derivative along `axis`.
  GridFunction partial(int axis) const;
  cplx mean() const { return grid_->mean(values_); }
  double sup_norm() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(const GridFunction& other);
  GridFunction& operator*=(cplx s);

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);

}  // namespace vortexlab
