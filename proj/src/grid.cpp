#include "vortexlab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "vortexlab/error.hpp"

namespace vortexlab {

namespace {

// The FFTW planner is not thread safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSPDMetric: return "NonSPDMetric";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::WrongDegree: return "WrongDegree";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::SingularMonodromy: return "SingularMonodromy";
    case ErrorCode::LogBranchFailure: return "LogBranchFailure";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::ZeroRank: return "ZeroRank";
    case ErrorCode::ZeroSection: return "ZeroSection";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::StepUnstable: return "StepUnstable";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::NotFlatSection: return "NotFlatSection";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Grid::Grid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim < 1 || dim > 2) throw Error(ErrorCode::InvalidArgument, "grid dimension must be 1 or 2");
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw Error(ErrorCode::BadGrid, "grid size must be even and at least 8");
  size_ = dim == 1 ? std::size_t(n_) : std::size_t(n_) * std::size_t(n_);

  std::vector<cplx> a(size_), b(size_);
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim == 1) {
    forward_plan_ = fftw_plan_dft_1d(n_, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(n_, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  } else {
    // Row-major with axis 1 slowest matches index = i0 + N*i1.
    forward_plan_ = fftw_plan_dft_2d(n_, n_, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_2d(n_, n_, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  }
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

double Grid::coordinate(std::size_t index, int axis) const {
  const std::size_t i = axis == 0 ? index % std::size_t(n_) : index / std::size_t(n_);
  return double(i) / double(n_);
}

std::array<double, 2> Grid::point(std::size_t index) const {
  return {coordinate(index, 0), dim_ > 1 ? coordinate(index, 1) : 0.0};
}

int Grid::wavenumber(std::size_t index, int axis) const {
  const int i = int(axis == 0 ? index % std::size_t(n_) : index / std::size_t(n_));
  return i < n_ / 2 ? i : i - n_;
}

void Grid::forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in), as_fftw(out));
}

void Grid::backward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(in), as_fftw(out));
}

std::vector<cplx> Grid::derivative(std::span<const cplx> values, int axis) const {
  if (axis < 0 || axis >= dim_) throw Error(ErrorCode::InvalidArgument, "derivative axis out of range");
  std::vector<cplx> spectrum(size_), out(size_);
  forward(values.data(), spectrum.data());
  const double scale = 1.0 / double(size_);
  for (std::size_t s = 0; s < size_; ++s) {
    const int k = wavenumber(s, axis);
    if (2 * std::abs(k) == n_) {
      spectrum[s] = 0.0;
    } else {
      spectrum[s] *= cplx(0.0, 2.0 * std::numbers::pi * k) * scale;
    }
  }
  backward(spectrum.data(), out.data());
  return out;
}

std::vector<cplx> Grid::apply_multiplier(std::span<const cplx> values,
                                         const std::function<double(int, int)>& symbol) const {
  std::vector<cplx> spectrum(size_), out(size_);
  forward(values.data(), spectrum.data());
  const double scale = 1.0 / double(size_);
  for (std::size_t s = 0; s < size_; ++s) {
    const int k0 = wavenumber(s, 0);
    const int k1 = dim_ > 1 ? wavenumber(s, 1) : 0;
    spectrum[s] *= symbol(k0, k1) * scale;
  }
  backward(spectrum.data(), out.data());
  return out;
}

cplx Grid::mean(std::span<const cplx> values) const {
  cplx sum = 0.0;
  for (const cplx& v : values) sum += v;
  return sum / double(values.size());
}

GridFunction::GridFunction(GridPtr grid, cplx fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}

GridFunction::GridFunction(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw Error(ErrorCode::InvalidArgument, "field size does not match grid");
}

GridFunction GridFunction::from(GridPtr grid, const std::function<cplx(double, double)>& f) {
  GridFunction out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto p = grid->point(i);
    out[i] = f(p[0], p[1]);
  }
  return out;
}

GridFunction GridFunction::partial(int axis) const { return GridFunction(grid_, grid_->derivative(values_, axis)); }

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (const cplx& v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (cplx& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

}  // namespace vortexlab
