#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "generators.hpp"

using namespace vortexlab;

namespace {

CMat diag(std::initializer_list<cplx> d) {
  CMat m = CMat::Zero(Eigen::Index(d.size()), Eigen::Index(d.size()));
  Eigen::Index i = 0;
  for (cplx v : d) m(i, i) = v, ++i;
  return m;
}

CMat jordan2(cplx lam) {
  CMat m(2, 2);
  m << lam, 1.0, 0.0, lam;
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("logarithms reproduce the monodromies and commute") {
  for (auto kind : {gen::Family::unitary, gen::Family::diagonalizable, gen::Family::jordan})
    for (int r = 1; r <= 3; ++r)
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed * 31 + std::uint64_t(r));
        const FlatBundle B = gen::bundle(2, r, kind, rng);
        for (int i = 0; i < 2; ++i) {
          const CMat& L = B.logs()[std::size_t(i)];
          const CMat& rho = B.monodromies()[std::size_t(i)];
          CHECK((L.exp() - rho).norm() < 1e-10 * (1 + rho.norm()));
          // Principal branch: spectrum of L in the strip |Im| < π.
          for (auto ev : L.eigenvalues()) CHECK(std::abs(ev.imag()) < std::numbers::pi);
        }
        const CMat& L0 = B.logs()[0];
        const CMat& L1 = B.logs()[1];
        CHECK((L0 * L1 - L1 * L0).norm() < 1e-9 * (1 + L0.norm() * L1.norm()));
      }
}

TEST_CASE("log frame is periodic up to the monodromy") {
  Rng rng(3);
  const FlatBundle B = gen::bundle(2, 2, gen::Family::jordan, rng);
  const std::array<double, 2> e0{1.0, 0.0}, e1{0.0, 1.0};
  CHECK((B.frame(e0) - B.monodromies()[0]).norm() < 1e-10);
  CHECK((B.frame(e1) - B.monodromies()[1]).norm() < 1e-10);
}

TEST_CASE("construction failures") {
  CMat a(2, 2), b(2, 2);
  a << 1, 1, 0, 1;
  b << 1, 0, 1, 1;
  CHECK(code_of([&] { make_flat_bundle({a, b}); }) == ErrorCode::NonCommuting);
  CHECK(code_of([&] { make_flat_bundle({diag({1.0, 0.0})}); }) == ErrorCode::SingularMonodromy);
  CHECK(code_of([&] { make_flat_bundle({diag({-1.0, 1.0})}); }) == ErrorCode::LogBranchFailure);
  const FlatBundle J = make_flat_bundle({jordan2(1.0)});
  CHECK(code_of([&] { make_flat_pair(J, CVec::Zero(2)); }) == ErrorCode::ZeroSection);
  CVec e2 = CVec::Zero(2);
  e2(1) = 1.0;
  CHECK(code_of([&] { make_flat_pair(J, e2); }) == ErrorCode::NotFlatSection);
  CVec e1 = CVec::Zero(2);
  e1(0) = 1.0;
  CHECK_NOTHROW(make_flat_pair(J, e1));
}

TEST_CASE("flat sections and minimal invariant subbundles") {
  const FlatBundle J = make_flat_bundle({jordan2(1.0)});
  CHECK(flat_section_space(J).cols() == 1);
  CVec e1 = CVec::Zero(2), e2 = CVec::Zero(2);
  e1(0) = 1.0;
  e2(1) = 1.0;
  CHECK(minimal_invariant_subbundle(J, e1).rank() == 1);
  CHECK(minimal_invariant_subbundle(J, e2).rank() == 2);
  CHECK(flat_section_space(trivial_bundle(2, 3)).cols() == 3);
  CHECK(flat_section_space(make_flat_bundle({diag({2.0, 3.0})})).cols() == 0);
}

TEST_CASE("invariant subspace lists for known families") {
  SUBCASE("distinct eigenvalues give the coordinate lines") {
    const auto L = invariant_subbundle_list(make_flat_bundle({diag({2.0, 3.0})}));
    CHECK(L.complete);
    CHECK(L.subspaces.size() == 2);
  }
  SUBCASE("a Jordan block has exactly one invariant line") {
    const auto L = invariant_subbundle_list(make_flat_bundle({jordan2(2.0)}));
    CHECK(L.complete);
    REQUIRE(L.subspaces.size() == 1);
    CHECK(std::abs(L.subspaces[0].basis(1, 0)) < 1e-12);
  }
  SUBCASE("scalar monodromy has a continuum of lines") {
    const auto L = invariant_subbundle_list(trivial_bundle(1, 2));
    CHECK_FALSE(L.complete);
  }
  SUBCASE("rank 3 with distinct eigenvalues has six proper subspaces") {
    const auto L = invariant_subbundle_list(make_flat_bundle({diag({1.0, 2.0, 3.0})}));
    CHECK(L.complete);
    CHECK(L.subspaces.size() == 6);
  }
  SUBCASE("rank 4 is refused") {
    CHECK(code_of([&] { invariant_subbundle_list(trivial_bundle(1, 4)); }) == ErrorCode::RankTooLarge);
  }
}

TEST_CASE("every listed subspace is invariant (random families)") {
  for (auto kind : {gen::Family::diagonalizable, gen::Family::jordan, gen::Family::unitary})
    for (int r = 2; r <= 3; ++r)
      for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        CAPTURE(seed);
        CAPTURE(r);
        Rng rng(seed);
        const FlatBundle B = gen::bundle(2, r, kind, rng);
        const auto L = invariant_subbundle_list(B);
        CHECK(L.subspaces.size() >= 1);
        for (const auto& S : L.subspaces) {
          CHECK(S.rank() >= 1);
          CHECK(S.rank() < r);
          CHECK(invariance_residual(B, S.basis) < 1e-8);
          CHECK((S.basis.adjoint() * S.basis - CMat::Identity(S.rank(), S.rank())).norm() < 1e-10);
        }
      }
}

TEST_CASE("restriction, quotient and direct sum preserve the spectrum") {
  Rng rng(11);
  const FlatBundle B = gen::bundle(2, 3, gen::Family::diagonalizable, rng);
  const auto L = invariant_subbundle_list(B);
  REQUIRE_FALSE(L.subspaces.empty());
  const FlatSubbundle& S = L.subspaces.front();
  const FlatBundle sub = restrict_bundle(B, S);
  const FlatBundle quo = quotient_bundle(B, S);
  CHECK(sub.rank() + quo.rank() == B.rank());
  const FlatBundle sum = direct_sum(sub, quo);
  for (int i = 0; i < 2; ++i) {
    const cplx det_b = B.monodromies()[std::size_t(i)].determinant();
    const cplx det_s = sum.monodromies()[std::size_t(i)].determinant();
    CHECK(std::abs(det_b - det_s) < 1e-9 * std::abs(det_b));
  }
}

TEST_CASE("orthonormal span and complements") {
  Rng rng(5);
  CMat m(3, 2);
  m.col(0) = gen::matrix(3, rng).col(0);
  m.col(1) = 2.0 * m.col(0);
  const CMat span = orthonormal_span(m);
  CHECK(span.cols() == 1);
  const CMat comp = complement_basis(span);
  CHECK(comp.cols() == 2);
  CHECK((span.adjoint() * comp).norm() < 1e-12);
}
