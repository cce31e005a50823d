#include <doctest.h>

#include <numbers>

#include "generators.hpp"
#include "vortexlab/torus.hpp"

using namespace vortexlab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("spectral derivative of a plane wave") {
  const TorusPtr M = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 16, 1.0);
  const int k0 = 3, k1 = -2;
  const auto wave = [&](double x, double y) { return std::exp(cplx(0, 2 * kPi * (k0 * x + k1 * y))); };
  const GridFunction f = GridFunction::from(M->grid(), wave);
  const GridFunction expected0 = cplx(0, 2 * kPi * k0) * f;
  const GridFunction expected1 = cplx(0, 2 * kPi * k1) * f;
  CHECK((f.partial(0) - expected0).sup_norm() < 1e-10);
  CHECK((f.partial(1) - expected1).sup_norm() < 1e-10);
}

TEST_CASE("del carries the factor one half") {
  const TorusPtr M = make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0);
  FormField f(M->calc(), 0, 0);
  f.at(0, 0) = GridFunction::from(M->grid(), [](double x, double) { return std::sin(2 * kPi * x); });
  const GridFunction expected = GridFunction::from(M->grid(), [](double x, double) { return kPi * std::cos(2 * kPi * x); });
  CHECK((del(f).at(1, 0) - expected).sup_norm() < 1e-11);
  CHECK((delbar(f).at(0, 1) - expected).sup_norm() < 1e-11);
}

TEST_CASE("calculus identities on random band-limited forms") {
  for (int n : {1, 2}) {
    const TorusPtr M = make_torus(n, Eigen::MatrixXd::Identity(n, n), 32, 1.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CAPTURE(n);
      CAPTURE(seed);
      Rng rng(seed);
      const FormField f = random_form(M->calc(), 0, 0, rng);
      if (n == 2) {
        CHECK(del(del(f)).sup_norm() < 1e-10);
        CHECK(delbar(delbar(f)).sup_norm() < 1e-10);
      }
      CHECK((del(delbar(f)) + delbar(del(f))).sup_norm() < 1e-10);
      const FormField g = random_form(M->calc(), 0, 1, rng);
      if (n == 2) CHECK((del(delbar(g)) + delbar(del(g))).sup_norm() < 1e-10);
    }
  }
}

TEST_CASE("Leibniz rule for del over the wedge product") {
  const TorusPtr M = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 32, 1.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const FormField a = random_form(M->calc(), 0, 1, rng);
    const FormField b = random_form(M->calc(), 1, 0, rng);
    // The sign on the second term is (-1)^(k+l) of a, here -1.
    const FormField lhs = del(wedge(a, b));
    const FormField rhs = wedge(del(a), b) - wedge(a, del(b));
    CHECK((lhs - rhs).sup_norm() < 1e-10);
  }
}

TEST_CASE("wedge is associative") {
  const TorusPtr M = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 16, 1.0);
  Rng rng(7);
  const FormField a = random_form(M->calc(), 1, 0, rng);
  const FormField b = random_form(M->calc(), 0, 1, rng);
  const FormField c = random_form(M->calc(), 1, 1, rng);
  CHECK((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).sup_norm() < 1e-11);
}

TEST_CASE("Stokes on the torus: integral of del of an (n-1,n) form vanishes") {
  for (int n : {1, 2}) {
    const TorusPtr M = make_torus(n, Eigen::MatrixXd::Identity(n, n), 32, 1.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed);
      const FormField chi = random_form(M->calc(), n - 1, n, rng);
      const FormField psi = random_form(M->calc(), n, n - 1, rng);
      CHECK(std::abs(integrate(del(chi), *M)) < 1e-10);
      CHECK(std::abs(integrate(delbar(psi), *M)) < 1e-10);
    }
  }
}

TEST_CASE("volume equals n! det g / nu") {
  struct Case {
    int n;
    Eigen::MatrixXd g;
    double nu;
  };
  const std::vector<Case> cases = {{1, Eigen::MatrixXd::Constant(1, 1, 3.0), 1.0},
                                   {1, Eigen::MatrixXd::Constant(1, 1, 2.0), 4.0},
                                   {2, Eigen::MatrixXd::Identity(2, 2), 1.0},
                                   {2, Eigen::Matrix2d{{2.0, 0.0}, {0.0, 1.0}}, 1.0},
                                   {2, Eigen::Matrix2d{{1.0, 0.3}, {0.3, 1.5}}, 0.5}};
  for (const auto& c : cases) {
    const TorusPtr M = make_torus(c.n, c.g, 8, c.nu);
    const double expected = (c.n == 1 ? 1.0 : 2.0) * c.g.determinant() / c.nu;
    CHECK(M->volume() == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("constant metrics are Gauduchon") {
  CHECK(gauduchon_residual(*make_torus(2, Eigen::Matrix2d{{1.0, 0.3}, {0.3, 1.5}}, 16, 1.0)) < 1e-12);
  CHECK(gauduchon_residual(*make_torus(1, Eigen::MatrixXd::Identity(1, 1), 16, 1.0)) < 1e-12);
}

TEST_CASE("invalid tori are rejected") {
  CHECK_THROWS_AS(make_torus(2, Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}}, 16, 1.0), Error);
  CHECK_THROWS_AS(make_torus(3, Eigen::MatrixXd::Identity(3, 3), 16, 1.0), Error);
  CHECK_THROWS_AS(make_torus(1, Eigen::MatrixXd::Identity(1, 1), 15, 1.0), Error);
}
