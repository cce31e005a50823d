#include "vortexlab/flat_bundle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "vortexlab/error.hpp"

namespace vortexlab {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kCommuteTol = 1e-12;

// Inverse scaling and squaring. Principal square roots are taken by Schur
// recurrences that stay accurate for repeated eigenvalues, where the
// Schur-Parlett logarithm loses about half the digits on Jordan blocks.
CMat principal_log(const CMat& m) {
  const Eigen::Index r = m.rows();
  const CMat I = CMat::Identity(r, r);
  CMat A = m;
  int squarings = 0;
  while ((A - I).operatorNorm() > 0.2) {
    if (++squarings > 64) throw Error(ErrorCode::LogBranchFailure, "square-root iteration did not approach the identity");
    A = A.sqrt();
  }
  const CMat X = A - I;
  CMat term = X, series = CMat::Zero(r, r);
  for (int j = 1; j <= 60 && term.norm() > 1e-18; ++j) {
    series += (j % 2 == 1 ? 1.0 : -1.0) / j * term;
    term = term * X;
  }
  return std::ldexp(1.0, squarings) * series;
}
// Eigenvalues of a defective block split by O(sqrt(eps)); clusters are merged at this scale.
constexpr double kClusterTol = 1e-6;

// Fixed generic weights for the combination Σ c_i ρ_i that separates joint eigenvalues.
constexpr double kWeights[] = {1.0, 0.6180339887498949, 0.41421356237309515};

CMat null_space(const CMat& a, double tol = kRankTol) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace

CMat orthonormal_span(const CMat& m, double tol) {
  if (m.cols() == 0) return CMat(m.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++rank;
  return svd.matrixU().leftCols(rank);
}

CMat FlatBundle::frame(std::span<const double> x) const {
  CMat a = CMat::Zero(rank_, rank_);
  for (std::size_t i = 0; i < logs_.size() && i < x.size(); ++i) a += x[i] * logs_[i];
  return a.exp();
}

FlatBundle make_flat_bundle(const std::vector<CMat>& monodromies) {
  if (monodromies.empty()) throw Error(ErrorCode::InvalidArgument, "at least one monodromy is required");
  const Eigen::Index r = monodromies.front().rows();
  for (const CMat& m : monodromies) {
    if (m.rows() != r || m.cols() != r || r == 0)
      throw Error(ErrorCode::InvalidArgument, "monodromies must be square of equal size");
    Eigen::JacobiSVD<CMat> svd(m);
    if (svd.singularValues().minCoeff() <= 1e-12 * std::max(1.0, svd.singularValues()(0)))
      throw Error(ErrorCode::SingularMonodromy, "monodromy is not invertible");
  }
  for (std::size_t i = 0; i < monodromies.size(); ++i)
    for (std::size_t j = i + 1; j < monodromies.size(); ++j) {
      const CMat& a = monodromies[i];
      const CMat& b = monodromies[j];
      if ((a * b - b * a).norm() > kCommuteTol * (1.0 + a.norm() * b.norm()))
        throw Error(ErrorCode::NonCommuting, "monodromies " + std::to_string(i + 1) + " and " +
                                                 std::to_string(j + 1) + " do not commute");
    }

  FlatBundle B;
  B.rank_ = int(r);
  B.monodromies_ = monodromies;
  for (const CMat& m : monodromies) {
    Eigen::ComplexEigenSolver<CMat> eig(m, false);
    for (Eigen::Index k = 0; k < r; ++k) {
      const cplx lambda = eig.eigenvalues()(k);
      if (lambda.real() <= 0.0 && std::abs(lambda.imag()) <= 1e-12 * std::abs(lambda))
        throw Error(ErrorCode::LogBranchFailure, "monodromy has an eigenvalue on the closed negative real axis");
    }
    CMat log = principal_log(m);
    if ((log.exp() - m).norm() > 1e-10 * (1.0 + m.norm()))
      throw Error(ErrorCode::LogBranchFailure, "principal logarithm failed to reproduce the monodromy");
    B.logs_.push_back(std::move(log));
  }
  for (std::size_t i = 0; i < B.logs_.size(); ++i)
    for (std::size_t j = i + 1; j < B.logs_.size(); ++j)
      if ((B.logs_[i] * B.logs_[j] - B.logs_[j] * B.logs_[i]).norm() > 1e-10)
        throw Error(ErrorCode::LogBranchFailure, "principal logarithms do not commute");
  return B;
}

FlatBundle trivial_bundle(int n, int r) { return make_flat_bundle(std::vector<CMat>(std::size_t(n), CMat::Identity(r, r))); }

FlatPair make_flat_pair(FlatBundle bundle, CVec phi) {
  if (phi.size() != bundle.rank()) throw Error(ErrorCode::InvalidArgument, "section size does not match rank");
  if (phi.norm() == 0.0) throw Error(ErrorCode::ZeroSection, "flat pair needs a nonzero section");
  for (const CMat& m : bundle.monodromies())
    if ((m * phi - phi).norm() > 1e-12 * (1.0 + phi.norm()))
      throw Error(ErrorCode::NotFlatSection, "section is not fixed by the monodromy");
  return FlatPair{std::move(bundle), FlatSection{std::move(phi)}};
}

double invariance_residual(const FlatBundle& B, const CMat& basis) {
  if (basis.cols() == 0) return 0.0;
  const CMat q = orthonormal_span(basis);
  const CMat proj = CMat::Identity(B.rank(), B.rank()) - q * q.adjoint();
  double worst = 0.0;
  for (const CMat& m : B.monodromies()) {
    worst = std::max(worst, (proj * m * q).norm());
    worst = std::max(worst, (proj * m.inverse() * q).norm());
  }
  return worst;
}

CMat flat_section_space(const FlatBundle& B) {
  const int r = B.rank();
  CMat stacked(r * B.dim(), r);
  for (int i = 0; i < B.dim(); ++i) stacked.middleRows(i * r, r) = B.monodromies()[i] - CMat::Identity(r, r);
  return null_space(stacked);
}

FlatSubbundle minimal_invariant_subbundle(const FlatBundle& B, const CVec& v) {
  if (v.size() != B.rank()) throw Error(ErrorCode::InvalidArgument, "vector size does not match rank");
  if (v.norm() == 0.0) throw Error(ErrorCode::ZeroVector, "minimal invariant subbundle of the zero vector");
  CMat span = orthonormal_span(v);
  for (;;) {
    CMat grown = span;
    for (const CMat& m : B.monodromies()) {
      CMat next(grown.rows(), grown.cols() + 2 * span.cols());
      next << grown, m * span, m.inverse() * span;
      grown = next;
    }
    CMat q = orthonormal_span(grown);
    if (q.cols() == span.cols()) return FlatSubbundle{span};
    span = q;
  }
}

std::vector<JointEigenspace> joint_eigenspaces(const FlatBundle& B, const std::optional<CVec>& preferred) {
  const int r = B.rank();
  CMat combo = CMat::Zero(r, r);
  for (int i = 0; i < B.dim(); ++i) combo += kWeights[i % 3] * B.monodromies()[i];
  Eigen::ComplexEigenSolver<CMat> eig(combo, false);

  // Cluster eigenvalues of the generic combination.
  std::vector<std::pair<cplx, int>> clusters;
  for (Eigen::Index k = 0; k < r; ++k) {
    const cplx lambda = eig.eigenvalues()(k);
    bool merged = false;
    for (auto& [mu, count] : clusters) {
      if (std::abs(mu - lambda) <= kClusterTol * (1.0 + std::abs(mu))) {
        mu = (mu * double(count) + lambda) / double(count + 1);
        ++count;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.emplace_back(lambda, 1);
  }
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    return a.first.real() != b.first.real() ? a.first.real() < b.first.real() : a.first.imag() < b.first.imag();
  });

  std::vector<JointEigenspace> atoms;
  for (const auto& [mu, d] : clusters) {
    CMat shifted = combo - mu * CMat::Identity(r, r);
    CMat power = CMat::Identity(r, r);
    for (int p = 0; p < d; ++p) power = power * shifted;
    Eigen::JacobiSVD<CMat> svd(power, Eigen::ComputeFullV);
    JointEigenspace atom;
    atom.basis = svd.matrixV().rightCols(d);

    std::vector<CMat> nilpotent;
    double nil_norm = 0.0;
    for (const CMat& m : B.monodromies()) {
      const CMat restricted = atom.basis.adjoint() * m * atom.basis;
      const cplx lambda = restricted.trace() / double(d);
      atom.eigenvalues.push_back(lambda);
      nilpotent.push_back(restricted - lambda * CMat::Identity(d, d));
      nil_norm = std::max(nil_norm, nilpotent.back().norm() / (1.0 + std::abs(lambda)));
    }
    atom.semisimple = nil_norm <= 1e-8;

    // Invariant subspaces inside the atom, in atom coordinates first.
    std::vector<CMat> local;
    local.push_back(CMat(d, 0));
    if (d == 1 || atom.semisimple) {
      // Continuum for d ≥ 2: representatives from a basis led by the preferred vector.
      CMat basis = CMat::Identity(d, d);
      if (preferred) {
        const CVec coords = atom.basis.adjoint() * *preferred;
        if (coords.norm() > 1e-10) {
          CMat seeded(d, d + 1);
          seeded << coords, CMat::Identity(d, d);
          basis = orthonormal_span(seeded);
        }
      }
      for (unsigned m = 1; m + 1 < (1u << d); ++m) {
        CMat sub(d, std::popcount(m));
        int c = 0;
        for (int i = 0; i < d; ++i)
          if (m & (1u << i)) sub.col(c++) = basis.col(i);
        local.push_back(sub);
      }
      atom.complete = d == 1;
    } else {
      CMat nc = CMat::Zero(d, d);
      for (std::size_t i = 0; i < nilpotent.size(); ++i) nc += kWeights[i % 3] * nilpotent[i];
      Eigen::JacobiSVD<CMat> nsvd(nc);
      const auto& s = nsvd.singularValues();
      const int nrank = int((s.array() > 1e-8 * std::max(1.0, s(0))).count());
      if (d == 2 || nrank == d - 1) {
        // Single Jordan chain: kernels of powers of the regular nilpotent.
        CMat power = CMat::Identity(d, d);
        for (int p = 1; p < d; ++p) {
          power = power * nc;
          local.push_back(null_space(power, 1e-8));
        }
        atom.complete = true;
      } else {
        // d = 3 with square-zero nilpotents: lines in the common kernel and
        // planes through the image form continua.
        CMat stacked(d * int(nilpotent.size()), d);
        for (std::size_t i = 0; i < nilpotent.size(); ++i) stacked.middleRows(Eigen::Index(i) * d, d) = nilpotent[i];
        const CMat kernel = null_space(stacked, 1e-8);
        CMat image(d, d * Eigen::Index(nilpotent.size()));
        for (std::size_t i = 0; i < nilpotent.size(); ++i) image.middleCols(Eigen::Index(i) * d, d) = nilpotent[i];
        const CMat im = orthonormal_span(image, 1e-8);
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) local.push_back(kernel.col(c));
        if (preferred) {
          const CVec coords = atom.basis.adjoint() * *preferred;
          if (coords.norm() > 1e-10) local.push_back(coords.normalized());
        }
        local.push_back(kernel);
        if (im.cols() > 0) {
          const CMat outside = complement_basis(kernel);
          CMat plane(d, im.cols() + 1);
          plane << im, outside.col(0);
          local.push_back(orthonormal_span(plane));
        }
        atom.complete = false;
      }
    }
    local.push_back(CMat::Identity(d, d));
    for (const CMat& sub : local) atom.options.push_back(atom.basis * sub);
    atoms.push_back(std::move(atom));
  }
  return atoms;
}

InvariantSubspaceList invariant_subbundle_list(const FlatBundle& B, const std::optional<CVec>& preferred) {
  if (B.rank() > 3) throw Error(ErrorCode::RankTooLarge, "invariant subspace enumeration supports rank <= 3");
  InvariantSubspaceList out;
  out.atoms = joint_eigenspaces(B, preferred);
  for (const auto& atom : out.atoms) {
    if (!atom.complete) {
      out.complete = false;
      if (!out.family_note.empty()) out.family_note += "; ";
      out.family_note += "continuum of invariant subspaces inside a joint eigenspace of dimension " +
                         std::to_string(atom.basis.cols()) +
                         (atom.semisimple ? " (monodromy acts by scalars)" : " (square-zero nilpotent part)");
    }
  }

  // Direct sums of one option per atom.
  std::vector<std::size_t> choice(out.atoms.size(), 0);
  for (;;) {
    CMat sum(B.rank(), 0);
    for (std::size_t a = 0; a < out.atoms.size(); ++a) {
      const CMat& opt = out.atoms[a].options[choice[a]];
      CMat next(B.rank(), sum.cols() + opt.cols());
      next << sum, opt;
      sum = next;
    }
    if (sum.cols() > 0 && sum.cols() < B.rank()) {
      CMat q = orthonormal_span(sum);
      if (invariance_residual(B, q) < 1e-8) out.subspaces.push_back(FlatSubbundle{q});
    }
    std::size_t a = 0;
    while (a < choice.size() && ++choice[a] == out.atoms[a].options.size()) choice[a++] = 0;
    if (a == choice.size()) break;
  }
  return out;
}

FlatBundle restrict_bundle(const FlatBundle& B, const FlatSubbundle& S) {
  if (invariance_residual(B, S.basis) > 1e-8) throw Error(ErrorCode::NotInvariant, "subspace is not invariant");
  std::vector<CMat> ms;
  for (const CMat& m : B.monodromies()) ms.push_back(S.basis.adjoint() * m * S.basis);
  return make_flat_bundle(ms);
}

CMat complement_basis(const CMat& basis) {
  const Eigen::Index r = basis.rows();
  if (basis.cols() == 0) return CMat::Identity(r, r);
  Eigen::JacobiSVD<CMat> svd(basis, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(r - basis.cols());
}

FlatBundle quotient_bundle(const FlatBundle& B, const FlatSubbundle& S) {
  if (invariance_residual(B, S.basis) > 1e-8) throw Error(ErrorCode::NotInvariant, "subspace is not invariant");
  const CMat q = complement_basis(S.basis);
  std::vector<CMat> ms;
  for (const CMat& m : B.monodromies()) ms.push_back(q.adjoint() * m * q);
  return make_flat_bundle(ms);
}

FlatBundle direct_sum(const FlatBundle& a, const FlatBundle& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "direct sum of bundles over different bases");
  std::vector<CMat> ms;
  for (int i = 0; i < a.dim(); ++i) {
    CMat m = CMat::Zero(a.rank() + b.rank(), a.rank() + b.rank());
    m.topLeftCorner(a.rank(), a.rank()) = a.monodromies()[i];
    m.bottomRightCorner(b.rank(), b.rank()) = b.monodromies()[i];
    ms.push_back(m);
  }
  return make_flat_bundle(ms);
}

}  // namespace vortexlab
