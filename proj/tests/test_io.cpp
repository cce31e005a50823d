#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "vortexlab/report.hpp"
#include "vortexlab/selftest.hpp"
#include "vortexlab/snapshot.hpp"

using namespace vortexlab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("vortexlab_test_" + name); }

}  // namespace

TEST_CASE("complex number syntax") {
  CHECK(parse_complex("2") == cplx(2, 0));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("2i") == cplx(0, 2));
  CHECK(parse_complex("1+2i") == cplx(1, 2));
  CHECK(parse_complex("1 - 0.5i") == cplx(1, -0.5));
  CHECK(parse_complex("1e-3+2e+1i") == cplx(1e-3, 20));
  CHECK(parse_complex("-1.5-i") == cplx(-1.5, -1));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
  CHECK_THROWS_AS(parse_complex(""), Error);
}

TEST_CASE("matrix and vector syntax") {
  const CMat m = parse_matrix("1, 1; 0, 1");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == cplx(1, 0));
  CHECK(m(1, 0) == cplx(0, 0));
  CHECK_THROWS_AS(parse_matrix("1, 2; 3"), Error);
  const CVec v = parse_vector("1, i, 2-i");
  CHECK(v.size() == 3);
  CHECK(v(2) == cplx(2, -1));
}

TEST_CASE("full config file") {
  const ExperimentConfig cfg = parse(R"(# comment
[manifold]
n = 2
g = 2, 0; 0, 1
N = 16
nu = 1.5

[bundle]
monodromy1 = 1, 1; 0, 1
monodromy2 = 1, 0; 0, 1   # identity
phi = 1, 0

[run]
command = solve-vortex
tau = -2
dt = 0.02
max_iters = 100
tol = 1e-9
alpha_scale = 1+i
perturbation = 0.1

[output]
dir = out
format = csv
prefix = run1
)");
  CHECK(cfg.n == 2);
  CHECK(cfg.g(0, 0) == 2.0);
  CHECK(cfg.N == 16);
  CHECK(cfg.nu == 1.5);
  CHECK(cfg.monodromies.size() == 2);
  CHECK(cfg.phi->size() == 2);
  CHECK(cfg.command == "solve-vortex");
  CHECK(*cfg.tau == -2.0);
  CHECK(cfg.solver.dt == 0.02);
  CHECK(cfg.solver.max_iters == 100);
  CHECK(cfg.alpha_scale == cplx(1, 1));
  CHECK(cfg.format == "csv");
  CHECK(cfg.prefix == "run1");
  CHECK(cfg.torus()->volume() == doctest::Approx(2.0 * 2.0 / 1.5));
  CHECK(cfg.pair().bundle.rank() == 2);
}

TEST_CASE("config errors name the file and line") {
  CHECK(error_of("[manifold]\nn = 1\nbogus = 3\n").find("test.cfg:3:") != std::string::npos);
  CHECK(error_of("[nowhere]\n").find("test.cfg:1:") != std::string::npos);
  CHECK(error_of("n = 1\n").find("outside") != std::string::npos);
  CHECK(error_of("[run]\ntau = two\n").find("test.cfg:2:") != std::string::npos);
  CHECK(error_of("[output]\nformat = xml\n").find("format") != std::string::npos);
  CHECK_THROWS_AS(parse("[manifold]\nn = 2\n[bundle]\nmonodromy1 = 2\n").bundle(), Error);
  CHECK_THROWS_AS(parse("[manifold]\nn = 1\n").pair(), Error);
}

TEST_CASE("snapshot round trip is bit exact") {
  Rng rng(4);
  const TorusPtr M = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 8, 1.0);
  const FlatBundle B = gen::bundle(2, 2, gen::Family::jordan, rng);
  const MetricField h = random_metric(B, M->grid(), rng);
  const std::string path = temp_path("snapshot.bin").string();
  write_snapshot(path, h);
  const MetricField back = read_snapshot(path, B, M->grid());
  for (std::size_t p = 0; p < h.H().size(); ++p) CHECK((back.H()[p] - h.H()[p]).norm() == 0.0);

  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "VORTEXLAB-METRIC v1");

  const TorusPtr other = make_torus(2, Eigen::MatrixXd::Identity(2, 2), 16, 1.0);
  CHECK_THROWS_AS(read_snapshot(path, B, other->grid()), Error);
  CHECK_THROWS_AS(read_snapshot(path, trivial_bundle(2, 3), M->grid()), Error);

  fs::resize_file(path, fs::file_size(path) - 8);
  CHECK_THROWS_AS(read_snapshot(path, B, M->grid()), Error);
  fs::remove(path);
  CHECK_THROWS_AS(read_snapshot(path, B, M->grid()), Error);
}

TEST_CASE("reports are deterministic and schema-versioned") {
  const ExperimentConfig cfg = parse("[manifold]\nn = 1\nN = 16\n[bundle]\nphi = 1\n[run]\ntau = 2\n");
  for (const std::string command : {"degree", "stability", "solve-vortex", "verify-reduction"}) {
    CAPTURE(command);
    const CommandOutcome a = run_command(command, cfg);
    const CommandOutcome b = run_command(command, cfg);
    CHECK(a.exit_code == 0);
    CHECK(dump_report(a.report) == dump_report(b.report));
    CHECK(a.report.at("schema_version") == report_schema_version());
    CHECK(a.report.at("command") == command);
    CHECK(dump_report(a.report).back() == '\n');
  }
}

TEST_CASE("non-convergence maps to exit code 2 with the verdict and floor") {
  const ExperimentConfig cfg =
      parse("[manifold]\nn = 1\nN = 16\n[bundle]\nmonodromy1 = 1,1;0,1\nphi = 1,0\n[run]\ntau = 2\nmax_iters = 1500\n");
  const CommandOutcome out = run_command("solve-vortex", cfg);
  CHECK(out.exit_code == 2);
  CHECK(out.report.at("residual_floor").get<double>() > 0.0);
  CHECK(out.report.at("stability").at("verdict") == "unstable");
  REQUIRE(out.diagnostics.has_value());
  CHECK(trace_csv(*out.diagnostics).rfind("iteration,sup_residual,l2_residual\n", 0) == 0);
}

TEST_CASE("input errors propagate as Error") {
  const ExperimentConfig no_tau = parse("[manifold]\nn = 1\nN = 16\n[bundle]\nphi = 1\n");
  CHECK_THROWS_AS(run_command("solve-vortex", no_tau), Error);
  CHECK_THROWS_AS(run_command("frobnicate", no_tau), Error);
}

TEST_CASE("selftest passes for several seeds") {
  for (std::uint64_t seed : {1u, 2u, 17u}) {
    for (const auto& item : run_selftest(seed)) {
      CAPTURE(item.name);
      CAPTURE(item.value);
      CHECK(item.passed);
    }
  }
}
