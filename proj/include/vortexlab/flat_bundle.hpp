#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "vortexlab/grid.hpp"

namespace vortexlab {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Flat bundle on T^n given by commuting monodromies ρ_i (one per generator
/// of π₁) together with their principal logarithms L_i.
class FlatBundle {
 public:
  FlatBundle() = default;

  int rank() const { return rank_; }
  int dim() const { return int(monodromies_.size()); }
  const std::vector<CMat>& monodromies() const { return monodromies_; }
  const std::vector<CMat>& logs() const { return logs_; }

  /// Log-frame transition G(x) = exp(Σ x^i L_i).
  CMat frame(std::span<const double> x) const;

 private:
  friend FlatBundle make_flat_bundle(const std::vector<CMat>&);
  int rank_ = 0;
  std::vector<CMat> monodromies_;
  std::vector<CMat> logs_;
};

/// Validates commutation and invertibility and computes principal logs.
/// Throws NonCommuting, SingularMonodromy or LogBranchFailure.
FlatBundle make_flat_bundle(const std::vector<CMat>& monodromies);

/// The trivial flat bundle of rank r over T^n.
FlatBundle trivial_bundle(int n, int r);

struct FlatSection {
  CVec v;
};

struct FlatPair {
  FlatBundle bundle;
  FlatSection phi;
};

/// Throws ZeroSection or NotFlatSection (ρ_iφ ≠ φ beyond 1e-12).
FlatPair make_flat_pair(FlatBundle bundle, CVec phi);

/// Invariant subspace, stored as an orthonormal basis (r×s).
struct FlatSubbundle {
  CMat basis;
  int rank() const { return int(basis.cols()); }
};

/// Largest residual ‖(I − P)ρ^{±1}P‖ over the monodromies.
double invariance_residual(const FlatBundle& B, const CMat& basis);

/// Orthonormal basis of ∩_i ker(ρ_i − I) (SVD rank tolerance 1e-10).
CMat flat_section_space(const FlatBundle& B);

/// Smallest subspace containing v that is invariant under all ρ_i^{±1}.
FlatSubbundle minimal_invariant_subbundle(const FlatBundle& B, const CVec& v);

/// Joint generalized eigenspace of the monodromy family ("atom").
struct JointEigenspace {
  CMat basis;                    // orthonormal, r×d
  std::vector<cplx> eigenvalues; // joint eigenvalue of each ρ_i
  bool semisimple = false;       // all ρ_i act as scalars on it
  bool complete = true;          // invariant subspaces inside are finitely many
  std::vector<CMat> options;     // invariant subspaces inside (0 and the whole atom included)
};

struct InvariantSubspaceList {
  std::vector<FlatSubbundle> subspaces;  // proper, nonzero
  bool complete = true;
  std::string family_note;
  std::vector<JointEigenspace> atoms;
};

/// Joint generalized eigenspace decomposition of a commuting family.
std::vector<JointEigenspace> joint_eigenspaces(const FlatBundle& B, const std::optional<CVec>& preferred = {});

/// All proper nonzero invariant subspaces for r ≤ 3; for continuum families
/// (e.g. ρ_i = I with r ≥ 2) representatives are returned and complete=false.
/// `preferred` steers representatives of continuum families to contain it.
InvariantSubspaceList invariant_subbundle_list(const FlatBundle& B, const std::optional<CVec>& preferred = {});

/// Restriction to an invariant subspace, in the given orthonormal basis.
FlatBundle restrict_bundle(const FlatBundle& B, const FlatSubbundle& S);
/// Induced bundle on E/S, realized on the orthogonal complement of S.
FlatBundle quotient_bundle(const FlatBundle& B, const FlatSubbundle& S);
/// Orthonormal basis of the orthogonal complement of S.
CMat complement_basis(const CMat& basis);
FlatBundle direct_sum(const FlatBundle& a, const FlatBundle& b);

/// Column-orthonormal basis of the span of `m` (rank tolerance relative to the largest singular value).
CMat orthonormal_span(const CMat& m, double tol = 1e-10);

}  // namespace vortexlab
