#pragma once

#include "grassmin/matrix.hpp"
#include "grassmin/points.hpp"

namespace grassmin {

/// One optimization problem: minimize J(P) = Tr(BP) - 1/2 Tr(APAP) over
/// rank-m projectors, A symmetric positive semidefinite. C = B - A^2/2
/// is derived once and cached; it drives the convex relaxation
/// Jt(D) = Tr(CD) + 1/4 |[A,D]|^2, which agrees with J on the manifold.
struct ProblemInstance {
  SymMat A;
  SymMat B;
  SymMat C;
  int m = 0;
  int M = 0;

  /// Builds from (A, B); verifies A is PSD up to tolerance (throws
  /// naming the most negative eigenvalue) and caches C.
  static ProblemInstance from_AB(SymMat a, SymMat b, int m);
  /// Builds from (A, C) with B = C + A^2/2. Low-dimensional families in
  /// the tests are parametrized this way.
  static ProblemInstance from_AC(SymMat a, SymMat c, int m);
};

/// J(P) = Tr(BP) - 1/2 Tr(APAP). Total on symmetric matrices.
double cost(const ProblemInstance& inst, const SymMat& p);
inline double cost(const ProblemInstance& inst, const GrassmannPoint& p) { return cost(inst, p.P); }

/// Jt(D) = Tr(CD) + 1/4 |[A,D]|^2. Accepts arbitrary symmetric D;
/// line searches evaluate it on segments off the feasible set.
double relaxed_cost(const ProblemInstance& inst, const SymMat& d);

/// G(P) = grad J = B - APA (re-symmetrized).
SymMat cost_grad(const ProblemInstance& inst, const SymMat& p);

/// Gt(D) = grad Jt = C - 1/2 [[A,D],A] (re-symmetrized). In A's
/// eigenbasis this is entrywise C_ij + 1/2 (a_i - a_j)^2 D_ij.
SymMat relaxed_grad(const ProblemInstance& inst, const SymMat& d);

/// |[G(P), P]|_F; zero iff P is a critical point of J on the manifold.
double residual(const ProblemInstance& inst, const SymMat& p);
inline double residual(const ProblemInstance& inst, const GrassmannPoint& p) { return residual(inst, p.P); }

}  // namespace grassmin
