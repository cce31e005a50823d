#include <doctest.h>

#include <numbers>

#include "generators.hpp"
#include "vortexlab/metric.hpp"

using namespace vortexlab;
constexpr double kPi = std::numbers::pi;

namespace {

// Rank-one metric e^{a sin 2πx} on T¹ (constant in y on T²).
MetricField exp_sine(const FlatBundle& B, const GridPtr& grid, double a) {
  return MetricField::from(B, grid, [a](double x, double) {
    return CMat::Constant(1, 1, std::exp(a * std::sin(2 * kPi * x)));
  });
}

}  // namespace

TEST_CASE("mean curvature of a rank-one metric on the circle") {
  // K = -1/4 g^{11} (log h)'' for h = e^{a sin 2πx}: K = a π² g^{11} sin 2πx.
  for (double g11 : {1.0, 2.5}) {
    const TorusPtr M = make_torus(1, Eigen::MatrixXd::Constant(1, 1, g11), 32, 1.0);
    const double a = 0.7;
    const EndField K = mean_curvature(exp_sine(trivial_bundle(1, 1), M->grid(), a), *M);
    double err = 0.0;
    for (std::size_t p = 0; p < K.size(); ++p) {
      const double x = M->grid()->coordinate(p, 0);
      err = std::max(err, std::abs(K[p](0, 0) - a * kPi * kPi / g11 * std::sin(2 * kPi * x)));
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("curvature does not see the log-frame gauge of a rank-one bundle") {
  // In the flat frame h = |ρ|^{2x} H(x); the linear term drops out of (log h)''.
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 32, 1.0);
  for (cplx rho : {cplx(2.0), cplx(0.5, 0.5), std::polar(1.0, 2.0)}) {
    const FlatBundle B = make_flat_bundle({CMat::Constant(1, 1, rho)});
    const EndField K = mean_curvature(exp_sine(B, M->grid(), 0.4), *M);
    const EndField K0 = mean_curvature(exp_sine(trivial_bundle(1, 1), M->grid(), 0.4), *M);
    CHECK(sup_norm(K - K0) < 1e-10);
  }
}

TEST_CASE("constant metrics are flat for every monodromy") {
  const TorusPtr M = make_torus(2, Eigen::Matrix2d{{1.0, 0.2}, {0.2, 1.5}}, 16, 1.0);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Rng rng(seed);
    // Commuting unitary family with identity metric: flat and Hermitian.
    const FlatBundle U = gen::bundle(2, 2, gen::Family::unitary, rng);
    const MetricField h = MetricField::constant(U, M->grid(), CMat::Identity(2, 2));
    CHECK(sup_norm(mean_curvature(h, *M)) < 1e-10);
  }
}

TEST_CASE("Chern-trace identity on random metrics") {
  const TorusPtr M = make_torus(2, Eigen::Matrix2d{{2.0, 0.0}, {0.0, 1.0}}, 32, 1.0);
  for (auto kind : {gen::Family::diagonalizable, gen::Family::jordan})
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Rng rng(seed);
      const FlatBundle B = gen::bundle(2, 2, kind, rng);
      const MetricField h = random_metric(B, M->grid(), rng);
      CHECK(chern_trace_check(h, *M) < 1e-8);
      CHECK(self_adjointness_defect(h, mean_curvature(h, *M)) < 1e-8);
    }
}

TEST_CASE("degree of flat bundles vanishes for every metric") {
  for (const Eigen::MatrixXd& g : {Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2)),
                                   Eigen::MatrixXd(Eigen::Matrix2d{{2.0, 0.0}, {0.0, 1.0}})}) {
    const TorusPtr M = make_torus(2, g, 32, 1.0);
    for (int r = 1; r <= 3; ++r) {
      Rng rng(std::uint64_t(100 + r));
      const FlatBundle B = gen::bundle(2, r, gen::Family::diagonalizable, rng);
      const double d1 = degree(random_metric(B, M->grid(), rng), *M);
      const double d2 = degree(random_metric(B, M->grid(), rng), *M);
      CHECK(std::abs(d1) < 1e-8);
      CHECK(std::abs(d1 - d2) < 1e-8);
      CHECK(std::abs(degree(B, *M)) < 1e-12);
    }
  }
}

TEST_CASE("first Chern form of e^{a sin} matches the closed form") {
  // c₁ = -∂∂̄ log h has (1,1) coefficient -¼ (log h)'' = a π² sin 2πx.
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 32, 1.0);
  const FormField c1 = first_chern(exp_sine(trivial_bundle(1, 1), M->grid(), 1.3));
  const GridFunction expected =
      GridFunction::from(M->grid(), [](double x, double) { return 1.3 * kPi * kPi * std::sin(2 * kPi * x); });
  CHECK((c1.at(1, 1) - expected).sup_norm() < 1e-10);
}

TEST_CASE("metric validation and slope") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  CMat bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(MetricField::constant(trivial_bundle(1, 2), M->grid(), bad), Error);
  CMat nonherm(2, 2);
  nonherm << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(MetricField::constant(trivial_bundle(1, 2), M->grid(), nonherm), Error);
  CHECK(slope(trivial_bundle(1, 3), *M) == doctest::Approx(0.0));
}
