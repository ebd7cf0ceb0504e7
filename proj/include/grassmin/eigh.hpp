#pragma once

#include <vector>

#include "grassmin/matrix.hpp"

namespace grassmin {

/// Full symmetric eigendecomposition, eigenvalues ascending, column k of
/// Q paired with eigenvalues[k]. Output is deterministic for a fixed
/// input and backend; within a degenerate cluster the basis is whatever
/// the rotation history produced, fixed per run. Downstream code treats
/// clusters through gap values, never through individual indices.
struct SpectralDecomp {
  std::vector<double> eigenvalues;
  Mat Q;

  int dim() const { return Q.rows(); }
  /// Projector onto the span of eigenvector columns [lo, hi).
  SymMat projector(int lo, int hi) const;
};

/// Cyclic Jacobi. Robust and backward-stable at the matrix sizes this
/// library targets; throws std::runtime_error with a condition report
/// if the sweep limit is ever hit.
SpectralDecomp eigh(const SymMat& x);

/// Thin Householder QR of an m x n matrix (m >= n), with the sign of
/// each R diagonal fixed positive so the factorization is unique for
/// full-rank input. |R(i,i)| <= rank_tol * scale reports as rank_def.
struct ThinQR {
  Mat Q;  ///< m x n, orthonormal columns
  Mat R;  ///< n x n upper triangular, nonnegative diagonal
  bool rank_deficient = false;
};
ThinQR qr_thin(const Mat& a, double rank_tol = 1e-12);

/// One-sided Jacobi SVD returning left singular vectors and singular
/// values in descending order (right vectors are not accumulated; no
/// caller needs them).
struct ThinSVD {
  Mat U;                       ///< m x n
  std::vector<double> sigma;   ///< length n, descending, >= 0
};
ThinSVD svd_thin(const Mat& a);

/// Orthonormal basis of the column space: columns of U with singular
/// value > tol.
Mat column_space(const Mat& a, double tol);

}  // namespace grassmin
