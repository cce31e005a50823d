#pragma once

#include <memory>
#include <vector>

#include "vortexlab/grid.hpp"

namespace vortexlab {

/// coef · w^a w̄^b (1 + w w̄)^{−m} in the stereographic coordinate w.
struct SphereMono {
  cplx coef;
  int a = 0;
  int b = 0;
  int m = 0;
};

/// Finite sum of SphereMono terms; closed under products and ∂_w, ∂_w̄.
class SphereFunction {
 public:
  SphereFunction() = default;
  explicit SphereFunction(cplx c) { if (c != 0.0) terms_.push_back({c, 0, 0, 0}); }
  static SphereFunction mono(cplx coef, int a, int b, int m);

  const std::vector<SphereMono>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx eval(cplx w) const;
  /// Same value computed in the opposite chart w' = 1/w; each term becomes
  /// coef · w'^{m−a} w̄'^{m−b} (1 + |w'|²)^{−m}.
  cplx eval_chart(cplx w_prime) const;

  SphereFunction d_w() const;
  SphereFunction d_wbar() const;
  SphereFunction conj() const;

  SphereFunction& operator+=(const SphereFunction& o);
  friend SphereFunction operator+(SphereFunction a, const SphereFunction& b) { return a += b; }
  friend SphereFunction operator*(const SphereFunction& a, const SphereFunction& b);
  friend SphereFunction operator*(cplx s, SphereFunction a);

 private:
  void add(const SphereMono& t);
  std::vector<SphereMono> terms_;
};

/// Quadrature on P¹: Gauss–Legendre nodes in cos θ times uniform azimuth,
/// w = tan(θ/2) e^{iϕ}. Nodes with |w| > 1 are also described in the chart w' = 1/w.
struct ProjectiveGrid {
  int degree = 0;
  std::vector<cplx> w;
  std::vector<int> chart;            // 0: |w| ≤ 1, 1: chart w' = 1/w
  std::vector<cplx> chart_coord;     // w or 1/w
  std::vector<double> weights;       // Lebesgue dA = du dv weights in the w-plane
  std::vector<double> fs_density;    // (1+|w|²)^{−2}/π, total mass 1

  std::size_t size() const { return w.size(); }
  /// ∫_C f dA from samples at the nodes.
  cplx integrate(const std::vector<cplx>& f) const;
  /// Samples of f at the nodes, each evaluated in its own chart.
  std::vector<cplx> sample(const SphereFunction& f) const;
};

using ProjectiveGridPtr = std::shared_ptr<const ProjectiveGrid>;

/// Throws BadDegree for degree < 8.
ProjectiveGridPtr make_projective_grid(int degree);

/// Σ_t x_t(x) s_t(w): fields on X = M×P¹ built from separable products.
class SeparableField {
 public:
  struct Term {
    GridFunction x;
    SphereFunction s;
  };

  SeparableField() = default;
  explicit SeparableField(GridPtr grid) : grid_(std::move(grid)) {}
  SeparableField(GridFunction x, SphereFunction s);

  const GridPtr& grid() const { return grid_; }
  const std::vector<Term>& terms() const { return terms_; }

  SeparableField d_x(int axis) const;
  SeparableField d_w() const;
  SeparableField d_wbar() const;

  /// Values on the product grid, index p + grid.size()·q (q = P¹ node).
  std::vector<cplx> evaluate(const ProjectiveGrid& pg) const;
  double sup_norm(const ProjectiveGrid& pg) const;
  /// ∫_{M×C} f dx dA.
  cplx integrate(const ProjectiveGrid& pg) const;

  SeparableField& operator+=(const SeparableField& o);
  friend SeparableField operator+(SeparableField a, const SeparableField& b) { return a += b; }
  friend SeparableField operator*(const SeparableField& a, const SeparableField& b);
  friend SeparableField operator*(cplx s, SeparableField a);

 private:
  void push(Term t);
  GridPtr grid_;
  std::vector<Term> terms_;
};

}  // namespace vortexlab
