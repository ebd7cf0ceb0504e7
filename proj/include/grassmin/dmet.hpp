#pragma once

#include <vector>

#include "grassmin/objective.hpp"
#include "grassmin/points.hpp"

namespace grassmin {

/// A 1-RDM plus a fragment index set, block-decomposed once. The
/// fragment indices select rows/columns of gamma; the exterior is the
/// complement. offset = |gamma_ext,frag|_F^2 is the constant part of
/// the cluster cost.
struct BathSpec {
  SymMat gamma;               ///< L x L, 0 <= gamma <= I
  std::vector<int> fragment;  ///< sorted, 0-based, size l
  std::vector<int> exterior;  ///< complement, sorted, size M = L - l

  SymMat gamma_frag;  ///< l x l
  SymMat gamma_ext;   ///< M x M
  Mat ext_frag;       ///< M x l block gamma[ext, frag]
  double offset = 0.0;

  int L() const { return gamma.dim(); }
  int frag_dim() const { return static_cast<int>(fragment.size()); }
  int ext_dim() const { return static_cast<int>(exterior.size()); }

  /// Validates the Pauli constraint 0 <= gamma <= I and
  /// 1 <= l <= L - 2; throws on violation.
  static BathSpec build(SymMat gamma, std::vector<int> fragment);
};

struct RdmDiagnostics {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double trace = 0.0;
  double idempotency = 0.0;  ///< |gamma^2 - gamma|_F
  bool slater = false;       ///< idempotency <= 1e-8
};

/// Spectral diagnostics of a trial 1-RDM. Throws when the Pauli
/// constraint is violated beyond tolerance; when expected_trace >= 0 the
/// trace is checked against it as well.
RdmDiagnostics validate_rdm(const SymMat& gamma, double expected_trace = -1.0);

/// The reduced bath-construction problem: A = gamma_ext,
/// B = (gamma_ext^2 - gamma_ext,frag gamma_frag,ext)/2, so that
/// C = -gamma_ext,frag gamma_frag,ext / 2. The cluster cost is
/// 2 J(P) + offset.
ProblemInstance build_bath_problem(const BathSpec& spec, int m);

/// Entanglement proxy |Pi gamma Pi_perp|_F^2 of the cluster defined by
/// the fragment plus the bath projector P. Evaluated both directly in
/// the L-dimensional space and through the reduced instance; the two
/// routes are asserted equal.
double cluster_cost(const BathSpec& spec, const GrassmannPoint& p);

struct BathDimension {
  int min_bath = 0;   ///< dim(X) - l, the smallest fully disentangling m
  Mat cluster_basis;  ///< L x dim(X) orthonormal basis of X
};

/// The smallest gamma-invariant subspace containing the fragment:
/// X = H_frag + sum_i P_i H_frag over the nonzero eigenvalue clusters
/// of gamma (clusters grouped by eig_tol, rank decisions by frame_tol).
BathDimension min_bath_dimension(const BathSpec& spec, double eig_tol = 1e-8,
                                 double frame_tol = -1.0);

/// Slater case: orthonormal basis of H_frag + gamma H_frag obtained
/// from the QR factors of the ext-frag coupling block. Requires an
/// idempotent gamma; the induced cluster fully disentangles.
Mat slater_bath_qr(const BathSpec& spec, double frame_tol = -1.0);

}  // namespace grassmin
