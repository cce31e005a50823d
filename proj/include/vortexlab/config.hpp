#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>

#include "vortexlab/flow.hpp"

namespace vortexlab {

/// Experiment description read from a line-oriented `[section]` / `key = value` file.
///
///   [manifold]  n, g, N, nu
///   [bundle]    rank, monodromy1, monodromy2, phi
///   [run]       command, tau, dt, max_iters, tol, stall_window, checkpoint_every,
///               init_scale, warm_start, sigma, alpha_scale, fs_scale, p1_degree, perturbation, seed
///   [output]    dir, format, prefix
///
/// Complex numbers are written "a+bi"; matrix rows are separated by ';' and
/// entries by ','. Comments start with '#'.
struct ExperimentConfig {
  int n = 1;
  Eigen::MatrixXd g;  // identity when empty
  int N = 32;
  double nu = 1.0;

  int rank = 0;  // inferred from the monodromy or phi when 0
  std::vector<CMat> monodromies;
  std::optional<CVec> phi;

  std::string command;  // may also be given on the command line
  std::optional<double> tau;
  SolverConfig solver;
  std::string warm_start;
  std::optional<double> sigma;
  cplx alpha_scale = 1.0;
  std::optional<double> fs_scale;
  int p1_degree = 16;
  double perturbation = 0.0;
  std::uint64_t seed = 1;

  std::string out_dir = ".";
  std::string format = "json";
  std::string prefix = "vortexlab";

  TorusPtr torus() const;
  FlatBundle bundle() const;
  FlatPair pair() const;  // ConfigError when phi is missing
};

/// Throws ConfigError naming the source and line for malformed input or unknown keys.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

cplx parse_complex(const std::string& text);
CMat parse_matrix(const std::string& text);
CVec parse_vector(const std::string& text);

}  // namespace vortexlab
