#pragma once

#include <vector>

#include "grassmin/objective.hpp"
#include "grassmin/points.hpp"

namespace grassmin {

/// Result of the commuting-case closed form. When the m-th eigenvalue
/// of C is interior to a degenerate cluster, the minimizer is a
/// continuum: the fully occupied part is fixed and the remainder is any
/// projector on the tied eigenspace commuting with A. That freedom is
/// described, not enumerated.
struct CommutingSolution {
  GrassmannPoint P_star;   ///< one minimizer (deterministic representative)
  bool degenerate = false;
  double gap = 0.0;        ///< c_{m+1} - c_m
  std::vector<double> c;   ///< eigenvalues of C, ascending
  Mat tied_basis;          ///< orthonormal basis of the c_m eigenspace (empty if gapped)
  int occupied_below = 0;  ///< eigenvalues strictly below the tied cluster
};

/// Explicit solution when [A, B] = 0: diagonalize A and C in a common
/// frame and occupy the m lowest eigenvalues of C. Throws a
/// not-commuting error (pointing at the iterative solvers) when the
/// commutator exceeds tol_commute * |A| * |B|.
CommutingSolution solve_commuting(const ProblemInstance& inst, double tol_commute = 1e-10);

/// Commuting base pair plus first-order perturbation directions.
struct PerturbationInstance {
  SymMat A0;
  SymMat B0;
  SymMat A1;
  SymMat B1;
  int m = 0;

  /// Validates [A0, B0] = 0, builds the common eigenframe ordered by
  /// the eigenvalues of C0 = B0 - A0^2/2, and requires the gap
  /// c0_m < c0_{m+1} for the expansion to make sense.
  static PerturbationInstance build(SymMat a0, SymMat b0, SymMat a1, SymMat b1, int m);

  Mat frame;                ///< U0, columns ordered so c0 is ascending
  std::vector<double> a0;   ///< eigenvalues of A0 in the frame order
  std::vector<double> c0;   ///< eigenvalues of C0, ascending
};

struct FirstOrderExpansion {
  GrassmannPoint P0;
  SymMat P1;  ///< purely off-diagonal in the U0 frame, tangent at P0
};

/// First-order term of the minimizer expansion: in the frame,
/// (P1_ov)_ij = (B1_ov - a0_i A1_ov)_ij / (c0_{m+j} - c0_i + (a0_{m+j} - a0_i)^2 / 2),
/// the denominator strictly positive under the gap condition.
FirstOrderExpansion perturb_first_order(const PerturbationInstance& pi);

struct AngleScan {
  double theta_star = 0.0;
  double J_star = 0.0;
  std::vector<std::pair<double, double>> samples;  ///< (theta, J) on the grid
};

/// Exhaustive oracle on Gr(1, R^2): J evaluated on
/// P(theta) = (I + cos(theta) sz + sin(theta) sx)/2 over a uniform grid,
/// then golden-section refinement to 1e-12 in theta.
AngleScan bruteforce_angle_2x2(const ProblemInstance& inst, int grid_size = 100000);

}  // namespace grassmin
