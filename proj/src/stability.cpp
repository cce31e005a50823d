#include "vortexlab/stability.hpp"

#include <cmath>
#include <functional>

#include "vortexlab/metric.hpp"

namespace vortexlab {

namespace {

constexpr double kStrict = 1e-9;

bool contains(const CMat& basis, const CVec& v) {
  const CVec rest = v - basis * (basis.adjoint() * v);
  return rest.norm() <= 1e-9 * v.norm();
}

bool same_span(const CMat& a, const CMat& b) {
  if (a.cols() != b.cols()) return false;
  return (b - a * (a.adjoint() * b)).norm() <= 1e-9;
}

void add_unique(std::vector<FlatSubbundle>& list, const FlatSubbundle& s) {
  for (const auto& t : list)
    if (same_span(t.basis, s.basis)) return;
  list.push_back(s);
}

// Candidate invariant subspaces: the enumerated list plus the smallest one through φ.
std::vector<FlatSubbundle> candidates(const FlatPair& P, const InvariantSubspaceList& list) {
  std::vector<FlatSubbundle> out = list.subspaces;
  const FlatSubbundle m = minimal_invariant_subbundle(P.bundle, P.phi.v);
  if (m.rank() < P.bundle.rank()) add_unique(out, m);
  return out;
}

double quotient_slope(const FlatBundle& B, const FlatSubbundle& S, const AffineTorus& M) {
  return slope(quotient_bundle(B, S), M);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::polystable_not_stable: return "polystable_not_stable";
    case Verdict::unstable: return "unstable";
    case Verdict::undecidable: return "undecidable";
  }
  return "undecidable";
}

StabilityVerdict is_stable_flat(const FlatBundle& B, const AffineTorus& M) {
  const InvariantSubspaceList list = invariant_subbundle_list(B);
  StabilityVerdict out;
  out.complete = list.complete;
  const double mu = slope(B, M);
  for (const auto& s : list.subspaces) {
    const double sub = slope(restrict_bundle(B, s), M);
    if (sub >= mu - kStrict) out.witnesses.push_back({s.basis, sub, "sub"});
  }
  if (!out.witnesses.empty())
    out.verdict = Verdict::unstable;
  else
    out.verdict = list.complete ? Verdict::stable : Verdict::undecidable;
  return out;
}

StabilityVerdict is_polystable_flat(const FlatBundle& B, const AffineTorus& M) {
  StabilityVerdict stable = is_stable_flat(B, M);
  if (stable.verdict == Verdict::stable) return stable;

  // Commuting families share eigenvectors, so stable summands are lines and
  // polystability amounts to joint diagonalizability with equal slopes.
  StabilityVerdict out;
  const double mu = slope(B, M);
  bool diagonal = true;
  for (const auto& atom : joint_eigenspaces(B)) {
    if (!atom.semisimple) {
      diagonal = false;
      out.witnesses.push_back({atom.basis, slope(restrict_bundle(B, {atom.basis}), M), "sub"});
      continue;
    }
    for (Eigen::Index c = 0; c < atom.basis.cols(); ++c) {
      const FlatSubbundle line{atom.basis.col(c)};
      const double s = slope(restrict_bundle(B, line), M);
      if (std::abs(s - mu) > kStrict) diagonal = false;
      out.witnesses.push_back({line.basis, s, "summand"});
    }
  }
  out.verdict = diagonal ? Verdict::polystable_not_stable : Verdict::unstable;
  return out;
}

StabilityVerdict is_tau_stable(const FlatPair& P, double tau, const AffineTorus& M) {
  const FlatBundle& B = P.bundle;
  const InvariantSubspaceList list = invariant_subbundle_list(B, P.phi.v);
  StabilityVerdict out;
  out.complete = list.complete;

  const double mu = slope(B, M);
  if (mu >= tau - kStrict) out.witnesses.push_back({CMat::Identity(B.rank(), B.rank()), mu, "sub"});
  for (const auto& s : candidates(P, list)) {
    const double sub = slope(restrict_bundle(B, s), M);
    if (sub >= tau - kStrict) out.witnesses.push_back({s.basis, sub, "sub"});
    if (contains(s.basis, P.phi.v)) {
      const double q = quotient_slope(B, s, M);
      if (q <= tau + kStrict) out.witnesses.push_back({s.basis, q, "quotient"});
    }
  }
  if (!out.witnesses.empty())
    out.verdict = Verdict::unstable;
  else
    out.verdict = list.complete ? Verdict::stable : Verdict::undecidable;
  return out;
}

StabilityVerdict is_tau_polystable(const FlatPair& P, double tau, const AffineTorus& M) {
  StabilityVerdict stable = is_tau_stable(P, tau, M);
  if (stable.verdict == Verdict::stable) return stable;

  const FlatBundle& B = P.bundle;
  const int r = B.rank();
  const double target = tau / M.dim();
  const InvariantSubspaceList list = invariant_subbundle_list(B, P.phi.v);
  const std::vector<FlatSubbundle> cands = candidates(P, list);
  bool undecided = stable.verdict == Verdict::undecidable;

  for (const auto& first : cands) {
    if (!contains(first.basis, P.phi.v)) continue;
    for (const auto& second : cands) {
      if (second.rank() != r - first.rank()) continue;
      CMat both(r, r);
      both << first.basis, second.basis;
      if (Eigen::JacobiSVD<CMat>(both).singularValues().minCoeff() < 1e-8) continue;

      const FlatBundle rest = restrict_bundle(B, second);
      const double s = slope(rest, M);
      if (std::abs(s - target) > kStrict) continue;
      const StabilityVerdict poly = is_polystable_flat(rest, M);
      if (poly.verdict == Verdict::unstable) continue;

      const FlatPair sub{restrict_bundle(B, first), FlatSection{first.basis.adjoint() * P.phi.v}};
      const StabilityVerdict inner = is_tau_stable(sub, tau, M);
      if (inner.verdict == Verdict::stable && poly.verdict != Verdict::undecidable) {
        StabilityVerdict out;
        out.verdict = Verdict::polystable_not_stable;
        out.complete = list.complete;
        out.witnesses.push_back({first.basis, slope(sub.bundle, M), "sub"});
        out.witnesses.push_back({second.basis, s, "summand"});
        return out;
      }
      if (inner.verdict == Verdict::undecidable || poly.verdict == Verdict::undecidable) undecided = true;
    }
  }

  StabilityVerdict out;
  out.complete = list.complete;
  out.witnesses = stable.witnesses;
  if (list.complete && !undecided) {
    out.verdict = Verdict::unstable;
    return out;
  }

  // Slopes of invariant subspaces are dimension-weighted averages of the
  // joint-eigenspace slopes. A decomposition needs E' ∋ φ with μ(E') < τ and a
  // complement of slope τ/n; if no dimension split allows both, none exists.
  std::vector<std::pair<int, double>> atoms;
  for (const auto& atom : list.atoms)
    atoms.emplace_back(int(atom.basis.cols()), slope(restrict_bundle(B, {atom.basis}), M));
  bool reachable = stable.verdict == Verdict::undecidable;
  std::function<void(std::size_t, int, double, double)> walk = [&](std::size_t a, int dim, double deg,
                                                                    double total) {
    if (a == atoms.size()) {
      const int rest = r - dim;
      if (dim > 0 && rest > 0 && deg / dim < tau - kStrict && std::abs((total - deg) / rest - target) <= kStrict)
        reachable = true;
      return;
    }
    const auto [d, mu] = atoms[a];
    for (int k = 0; k <= d; ++k) walk(a + 1, dim + k, deg + k * mu, total + d * mu);
  };
  walk(0, 0, 0.0, 0.0);
  out.verdict = reachable ? Verdict::undecidable : Verdict::unstable;
  return out;
}

}  // namespace vortexlab
