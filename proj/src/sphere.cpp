#include "vortexlab/sphere.hpp"

#include <cmath>
#include <numbers>

#include "vortexlab/error.hpp"

namespace vortexlab {

namespace {

cplx ipow(cplx z, int k) {
  cplx out = 1.0;
  cplx base = k >= 0 ? z : 1.0 / z;
  for (int i = 0; i < std::abs(k); ++i) out *= base;
  return out;
}

// Gauss–Legendre nodes and weights on [−1, 1].
void gauss_legendre(int count, std::vector<double>& x, std::vector<double>& wt) {
  x.resize(std::size_t(count));
  wt.resize(std::size_t(count));
  const unsigned n = unsigned(count);
  for (int k = 0; k < count; ++k) {
    double z = std::cos(std::numbers::pi * (k + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(n, z);
      const double q = std::legendre(n - 1, z);
      dp = count * (z * p - q) / (z * z - 1.0);
      const double step = p / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double p = std::legendre(n, z);
    const double q = std::legendre(n - 1, z);
    dp = count * (z * p - q) / (z * z - 1.0);
    x[std::size_t(k)] = z;
    wt[std::size_t(k)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

SphereFunction SphereFunction::mono(cplx coef, int a, int b, int m) {
  SphereFunction f;
  f.add({coef, a, b, m});
  return f;
}

void SphereFunction::add(const SphereMono& t) {
  if (t.coef == 0.0) return;
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (it->a == t.a && it->b == t.b && it->m == t.m) {
      it->coef += t.coef;
      if (it->coef == 0.0) terms_.erase(it);
      return;
    }
  }
  terms_.push_back(t);
}

cplx SphereFunction::eval(cplx w) const {
  const double s = 1.0 + std::norm(w);
  cplx out = 0.0;
  for (const auto& t : terms_) out += t.coef * ipow(w, t.a) * ipow(std::conj(w), t.b) * std::pow(s, -t.m);
  return out;
}

cplx SphereFunction::eval_chart(cplx z) const {
  const double s = 1.0 + std::norm(z);
  cplx out = 0.0;
  for (const auto& t : terms_)
    out += t.coef * ipow(z, t.m - t.a) * ipow(std::conj(z), t.m - t.b) * std::pow(s, -t.m);
  return out;
}

SphereFunction SphereFunction::d_w() const {
  SphereFunction out;
  for (const auto& t : terms_) {
    if (t.a > 0) out.add({t.coef * double(t.a), t.a - 1, t.b, t.m});
    if (t.m != 0) out.add({-t.coef * double(t.m), t.a, t.b + 1, t.m + 1});
  }
  return out;
}

SphereFunction SphereFunction::d_wbar() const {
  SphereFunction out;
  for (const auto& t : terms_) {
    if (t.b > 0) out.add({t.coef * double(t.b), t.a, t.b - 1, t.m});
    if (t.m != 0) out.add({-t.coef * double(t.m), t.a + 1, t.b, t.m + 1});
  }
  return out;
}

SphereFunction SphereFunction::conj() const {
  SphereFunction out;
  for (const auto& t : terms_) out.add({std::conj(t.coef), t.b, t.a, t.m});
  return out;
}

SphereFunction& SphereFunction::operator+=(const SphereFunction& o) {
  for (const auto& t : o.terms_) add(t);
  return *this;
}

SphereFunction operator*(const SphereFunction& a, const SphereFunction& b) {
  SphereFunction out;
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) out.add({s.coef * t.coef, s.a + t.a, s.b + t.b, s.m + t.m});
  return out;
}

SphereFunction operator*(cplx s, SphereFunction a) {
  if (s == 0.0) return SphereFunction();
  for (auto& t : a.terms_) t.coef *= s;
  return a;
}

cplx ProjectiveGrid::integrate(const std::vector<cplx>& f) const {
  cplx sum = 0.0;
  for (std::size_t q = 0; q < f.size(); ++q) sum += weights[q] * f[q];
  return sum;
}

std::vector<cplx> ProjectiveGrid::sample(const SphereFunction& f) const {
  std::vector<cplx> out(size());
  for (std::size_t q = 0; q < size(); ++q) out[q] = chart[q] == 0 ? f.eval(chart_coord[q]) : f.eval_chart(chart_coord[q]);
  return out;
}

ProjectiveGridPtr make_projective_grid(int degree) {
  if (degree < 8) throw Error(ErrorCode::BadDegree, "projective grid degree must be at least 8");
  auto pg = std::make_shared<ProjectiveGrid>();
  pg->degree = degree;
  std::vector<double> x, wt;
  gauss_legendre(degree + 1, x, wt);
  const int azimuth = 2 * degree + 2;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = std::sqrt((1.0 - x[k]) / (1.0 + x[k]));  // tan(θ/2) with cos θ = x
    const double s = 1.0 + r * r;
    for (int j = 0; j < azimuth; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / azimuth;
      const cplx w = std::polar(r, phi);
      const double area = wt[k] * 2.0 * std::numbers::pi / azimuth;  // unit-sphere area weight
      pg->w.push_back(w);
      pg->chart.push_back(r <= 1.0 ? 0 : 1);
      pg->chart_coord.push_back(r <= 1.0 ? w : 1.0 / w);
      pg->weights.push_back(area * s * s / 4.0);
      pg->fs_density.push_back(1.0 / (std::numbers::pi * s * s));
    }
  }
  return pg;
}

SeparableField::SeparableField(GridFunction x, SphereFunction s) : grid_(x.grid()) {
  push({std::move(x), std::move(s)});
}

void SeparableField::push(Term t) {
  if (t.s.is_zero()) return;
  if (!grid_) grid_ = t.x.grid();
  terms_.push_back(std::move(t));
}

SeparableField SeparableField::d_x(int axis) const {
  SeparableField out(grid_);
  for (const auto& t : terms_) out.push({t.x.partial(axis), t.s});
  return out;
}

SeparableField SeparableField::d_w() const {
  SeparableField out(grid_);
  for (const auto& t : terms_) out.push({t.x, t.s.d_w()});
  return out;
}

SeparableField SeparableField::d_wbar() const {
  SeparableField out(grid_);
  for (const auto& t : terms_) out.push({t.x, t.s.d_wbar()});
  return out;
}

std::vector<cplx> SeparableField::evaluate(const ProjectiveGrid& pg) const {
  const std::size_t G = grid_ ? grid_->size() : 0;
  std::vector<cplx> out(G * pg.size(), 0.0);
  for (const auto& t : terms_) {
    const std::vector<cplx> s = pg.sample(t.s);
    for (std::size_t q = 0; q < pg.size(); ++q)
      for (std::size_t p = 0; p < G; ++p) out[p + G * q] += t.x[p] * s[q];
  }
  return out;
}

double SeparableField::sup_norm(const ProjectiveGrid& pg) const {
  double m = 0.0;
  for (cplx v : evaluate(pg)) m = std::max(m, std::abs(v));
  return m;
}

cplx SeparableField::integrate(const ProjectiveGrid& pg) const {
  cplx sum = 0.0;
  for (const auto& t : terms_) sum += t.x.mean() * pg.integrate(pg.sample(t.s));
  return sum;
}

SeparableField& SeparableField::operator+=(const SeparableField& o) {
  for (const auto& t : o.terms_) push(t);
  return *this;
}

SeparableField operator*(const SeparableField& a, const SeparableField& b) {
  SeparableField out(a.grid_ ? a.grid_ : b.grid_);
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) out.push({s.x * t.x, s.s * t.s});
  return out;
}

SeparableField operator*(cplx s, SeparableField a) {
  if (s == 0.0) return SeparableField(a.grid_);
  for (auto& t : a.terms_) t.x *= s;
  return a;
}

}  // namespace vortexlab
