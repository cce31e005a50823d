#include <doctest.h>

#include "generators.hpp"
#include "vortexlab/stability.hpp"

using namespace vortexlab;

namespace {

CMat jordan2(cplx lam) {
  CMat m(2, 2);
  m << lam, 1.0, 0.0, lam;
  return m;
}

CVec e1(int r) {
  CVec v = CVec::Zero(r);
  v(0) = 1.0;
  return v;
}

const TorusPtr& circle() {
  static const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  return M;
}

}  // namespace

TEST_CASE("flat stability verdicts for the corpus") {
  const AffineTorus& M = *circle();
  CHECK(is_stable_flat(trivial_bundle(1, 1), M).verdict == Verdict::stable);
  CHECK(is_polystable_flat(trivial_bundle(1, 1), M).verdict == Verdict::stable);

  const FlatBundle D = make_flat_bundle({CMat(Eigen::Vector2cd(1.0, 2.0).asDiagonal())});
  CHECK(is_stable_flat(D, M).verdict != Verdict::stable);
  CHECK(is_polystable_flat(D, M).verdict == Verdict::polystable_not_stable);

  const FlatBundle J = make_flat_bundle({jordan2(1.0)});
  CHECK(is_stable_flat(J, M).verdict != Verdict::stable);
  CHECK(is_polystable_flat(J, M).verdict == Verdict::unstable);

  // Continuum of invariant lines: the list is incomplete but a violation is still found.
  const StabilityVerdict flat2 = is_stable_flat(trivial_bundle(1, 2), M);
  CHECK(flat2.verdict != Verdict::stable);
  CHECK(is_polystable_flat(trivial_bundle(1, 2), M).verdict == Verdict::polystable_not_stable);
}

TEST_CASE("tau-stability of the trivial line pair flips at zero") {
  const AffineTorus& M = *circle();
  const FlatPair P = make_flat_pair(trivial_bundle(1, 1), e1(1));
  CHECK(is_tau_stable(P, 1.0, M).verdict == Verdict::stable);
  CHECK(is_tau_polystable(P, 1.0, M).verdict == Verdict::stable);
  CHECK(is_tau_polystable(P, -1.0, M).verdict == Verdict::unstable);
}

TEST_CASE("rank-two pairs with phi = e1 are never tau-polystable") {
  const AffineTorus& M = *circle();
  const FlatPair J = make_flat_pair(make_flat_bundle({jordan2(1.0)}), e1(2));
  const FlatPair I2 = make_flat_pair(trivial_bundle(1, 2), e1(2));
  for (double tau_hat : {-1.0, 0.0, 1.0}) {
    CAPTURE(tau_hat);
    CHECK(is_tau_polystable(J, tau_hat, M).verdict == Verdict::unstable);
    CHECK(is_tau_polystable(I2, tau_hat, M).verdict == Verdict::unstable);
  }
}

TEST_CASE("unstable verdicts carry invariant witnesses") {
  const AffineTorus& M = *circle();
  const FlatBundle J = make_flat_bundle({jordan2(1.0)});
  const StabilityVerdict v = is_tau_polystable(make_flat_pair(J, e1(2)), 1.0, M);
  REQUIRE_FALSE(v.witnesses.empty());
  for (const auto& w : v.witnesses) {
    CHECK(w.basis.rows() == 2);
    if (w.role == "sub") {
      CHECK(invariance_residual(J, w.basis) < 1e-10);
    }
  }
}

TEST_CASE("verdicts are invariant under change of frame") {
  const AffineTorus& M = *circle();
  const std::vector<FlatPair> corpus = {
      make_flat_pair(trivial_bundle(1, 1), e1(1)),
      make_flat_pair(make_flat_bundle({jordan2(1.0)}), e1(2)),
      make_flat_pair(trivial_bundle(1, 2), e1(2)),
      make_flat_pair(make_flat_bundle({CMat(Eigen::Vector2cd(1.0, 2.0).asDiagonal())}), e1(2)),
  };
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Rng rng(seed);
    for (const FlatPair& P : corpus) {
      const int r = P.bundle.rank();
      const CMat S = gen::invertible(r, rng);
      const FlatBundle B2 = make_flat_bundle({S * P.bundle.monodromies()[0] * S.inverse()});
      const FlatPair Q = make_flat_pair(B2, S * P.phi.v);
      for (double tau_hat : {-1.0, 1.0}) {
        CAPTURE(seed);
        CAPTURE(tau_hat);
        CHECK(is_tau_polystable(P, tau_hat, M).verdict == is_tau_polystable(Q, tau_hat, M).verdict);
      }
      CHECK(is_polystable_flat(P.bundle, M).verdict == is_polystable_flat(B2, M).verdict);
    }
  }
}

TEST_CASE("semisimple random families are polystable, Jordan families are not") {
  const TorusPtr M = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 8, 1.0);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Rng rng(seed);
    for (int r = 2; r <= 3; ++r) {
      const FlatBundle D = gen::bundle(2, r, gen::Family::diagonalizable, rng);
      const FlatBundle J = gen::bundle(2, r, gen::Family::jordan, rng);
      CHECK(is_polystable_flat(D, *M).verdict == Verdict::polystable_not_stable);
      CHECK(is_polystable_flat(J, *M).verdict == Verdict::unstable);
    }
  }
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::stable) == "stable");
  CHECK(to_string(Verdict::undecidable) == "undecidable");
}
