#pragma once

#include <bit>
#include <cstddef>
#include <vector>

#include "vortexlab/error.hpp"

namespace vortexlab {

// Multi-indices are bitmasks over the coordinate set {0, ..., m-1}; a mask
// stands for the strictly increasing index list, i.e. dx^{i_1}∧...∧dx^{i_k}
// with i_1 < ... < i_k. All sign conventions for the (k,l) calculus are
// implemented in this header and nowhere else.
namespace mask {

inline int size(unsigned m) { return std::popcount(m); }

inline std::vector<unsigned> subsets(int dims, int k) {
  std::vector<unsigned> out;
  for (unsigned m = 0; m < (1u << dims); ++m)
    if (size(m) == k) out.push_back(m);
  return out;
}

/// Sign of dx^i ∧ dx^I relative to the sorted order of {i} ∪ I.
inline int prepend_sign(int i, unsigned I) { return size(I & ((1u << i) - 1)) % 2 == 0 ? 1 : -1; }

/// Sign of dx^A ∧ dx^B relative to the sorted order of A ∪ B (A, B disjoint).
inline int concat_sign(unsigned A, unsigned B) {
  int inversions = 0;
  for (int b = 0; b < 32; ++b)
    if (B & (1u << b)) inversions += size(A & ~((2u << b) - 1));
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace mask

/// A (k,l)-form Σ f_{I,J} dx^I ⊗ dx^J over `Calc::dims()` coordinates.
///
/// `Calc` supplies the coefficient ring and the two first-order operators:
/// `holo(f, i)` and `anti(f, j)` are the coefficient derivatives used by ∂ and ∂̄
/// (including the factor ½ of the extended calculus).
template <class Calc>
class Form {
 public:
  using Coeff = typename Calc::Coeff;

  Form(Calc calc, int k, int l) : calc_(std::move(calc)), k_(k), l_(l) {
    const int m = calc_.dims();
    if (k < 0 || l < 0 || k > m || l > m) throw Error(ErrorCode::DegreeOverflow, "bidegree exceeds dimension");
    first_ = mask::subsets(m, k);
    second_ = mask::subsets(m, l);
    comps_.assign(first_.size() * second_.size(), calc_.zero());
  }

  const Calc& calc() const { return calc_; }
  int dims() const { return calc_.dims(); }
  int k() const { return k_; }
  int l() const { return l_; }
  const std::vector<unsigned>& first_masks() const { return first_; }
  const std::vector<unsigned>& second_masks() const { return second_; }

  Coeff& at(unsigned I, unsigned J) { return comps_[slot(I, J)]; }
  const Coeff& at(unsigned I, unsigned J) const { return comps_[slot(I, J)]; }

  /// Adds s·f to the component of the possibly unsorted monomial given by signs.
  void accumulate(unsigned I, unsigned J, const Coeff& f, double sign) {
    Coeff& c = at(I, J);
    c = c + calc_.scale(f, sign);
  }

  Form& operator+=(const Form& o) {
    for (std::size_t s = 0; s < comps_.size(); ++s) comps_[s] = comps_[s] + o.comps_[s];
    return *this;
  }
  Form& operator-=(const Form& o) {
    for (std::size_t s = 0; s < comps_.size(); ++s) comps_[s] = comps_[s] - o.comps_[s];
    return *this;
  }
  Form scaled(typename Calc::Scalar s) const {
    Form out = *this;
    for (auto& c : out.comps_) c = calc_.scale(c, s);
    return out;
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, calc_.sup_norm(c));
    return m;
  }

 private:
  std::size_t index_of(const std::vector<unsigned>& list, unsigned m) const {
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i] == m) return i;
    throw Error(ErrorCode::WrongDegree, "multi-index does not match form degree");
  }
  std::size_t slot(unsigned I, unsigned J) const { return index_of(first_, I) * second_.size() + index_of(second_, J); }

  Calc calc_;
  int k_;
  int l_;
  std::vector<unsigned> first_;
  std::vector<unsigned> second_;
  std::vector<Coeff> comps_;
};

template <class Calc>
Form<Calc> operator+(Form<Calc> a, const Form<Calc>& b) { return a += b; }
template <class Calc>
Form<Calc> operator-(Form<Calc> a, const Form<Calc>& b) { return a -= b; }

/// ∂ = ½ (d ⊗ id): (∂f)_{iI,J} = ½ ∂_i f_{I,J}.
template <class Calc>
Form<Calc> del(const Form<Calc>& f) {
  if (f.k() >= f.dims()) throw Error(ErrorCode::DegreeOverflow, "del of a form of full first degree");
  Form<Calc> out(f.calc(), f.k() + 1, f.l());
  for (unsigned I : f.first_masks())
    for (unsigned J : f.second_masks())
      for (int i = 0; i < f.dims(); ++i) {
        if (I & (1u << i)) continue;
        out.accumulate(I | (1u << i), J, f.calc().holo(f.at(I, J), i), mask::prepend_sign(i, I));
      }
  return out;
}

/// ∂̄ = (−1)^k ½ (id ⊗ d).
template <class Calc>
Form<Calc> delbar(const Form<Calc>& f) {
  if (f.l() >= f.dims()) throw Error(ErrorCode::DegreeOverflow, "delbar of a form of full second degree");
  Form<Calc> out(f.calc(), f.k(), f.l() + 1);
  const double kSign = f.k() % 2 == 0 ? 1.0 : -1.0;
  for (unsigned I : f.first_masks())
    for (unsigned J : f.second_masks())
      for (int j = 0; j < f.dims(); ++j) {
        if (J & (1u << j)) continue;
        out.accumulate(I, J | (1u << j), f.calc().anti(f.at(I, J), j), kSign * mask::prepend_sign(j, J));
      }
  return out;
}

/// (χ₁⊗ψ₁)∧(χ₂⊗ψ₂) = (−1)^{l₁k₂} (χ₁∧χ₂)⊗(ψ₁∧ψ₂).
template <class Calc>
Form<Calc> wedge(const Form<Calc>& a, const Form<Calc>& b) {
  const int m = a.dims();
  if (a.k() + b.k() > m || a.l() + b.l() > m) throw Error(ErrorCode::DegreeOverflow, "wedge exceeds dimension");
  Form<Calc> out(a.calc(), a.k() + b.k(), a.l() + b.l());
  const double base = (a.l() * b.k()) % 2 == 0 ? 1.0 : -1.0;
  for (unsigned I1 : a.first_masks())
    for (unsigned J1 : a.second_masks())
      for (unsigned I2 : b.first_masks()) {
        if (I1 & I2) continue;
        for (unsigned J2 : b.second_masks()) {
          if (J1 & J2) continue;
          const double sign = base * mask::concat_sign(I1, I2) * mask::concat_sign(J1, J2);
          out.accumulate(I1 | I2, J1 | J2, a.calc().mul(a.at(I1, J1), b.at(I2, J2)), sign);
        }
      }
  return out;
}

/// f^p under the wedge product (f^0 is the unit function).
template <class Calc>
Form<Calc> wedge_power(const Form<Calc>& f, int p) {
  Form<Calc> out(f.calc(), 0, 0);
  out.at(0, 0) = f.calc().one();
  for (int i = 0; i < p; ++i) out = wedge(out, f);
  return out;
}

}  // namespace vortexlab
