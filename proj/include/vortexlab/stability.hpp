#pragma once

#include <string>
#include <vector>

#include "vortexlab/flat_bundle.hpp"
#include "vortexlab/torus.hpp"

namespace vortexlab {

enum class Verdict { stable, polystable_not_stable, unstable, undecidable };

std::string_view to_string(Verdict v);

struct Witness {
  CMat basis;        // orthonormal basis of the invariant subspace
  double slope = 0;  // slope of the subbundle, or of the quotient for quotient witnesses
  std::string role;  // "sub", "quotient", "summand"
};

struct StabilityVerdict {
  Verdict verdict = Verdict::undecidable;
  std::vector<Witness> witnesses;
  bool complete = true;
};

/// Strict slope inequality μ(E') < μ(E) over every proper invariant subspace.
StabilityVerdict is_stable_flat(const FlatBundle& B, const AffineTorus& M);
/// Decomposition into stable summands of equal slope (on tori: joint diagonalizability).
StabilityVerdict is_polystable_flat(const FlatBundle& B, const AffineTorus& M);
/// τ-stability of a flat pair.
StabilityVerdict is_tau_stable(const FlatPair& P, double tau, const AffineTorus& M);
/// τ-polystability: τ-stable, or E = E' ⊕ E'' with (E', φ) τ-stable and E'' polystable of slope τ/n.
StabilityVerdict is_tau_polystable(const FlatPair& P, double tau, const AffineTorus& M);

}  // namespace vortexlab
