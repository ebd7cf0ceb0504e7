#pragma once

#include "grassmin/objective.hpp"
#include "grassmin/points.hpp"

namespace grassmin {

/// Element of the tangent space at a projector P: symmetric X with
/// PXP = (I-P)X(I-P) = 0 (purely occupied-virtual blocks).
struct TangentVector {
  GrassmannPoint base;
  SymMat X;
};

/// M x m matrix with orthonormal columns; V V^T covers the Grassmannian.
struct StiefelPoint {
  Mat V;

  static StiefelPoint checked(Mat v);
  static StiefelPoint trusted(Mat v);
  int dim() const { return V.rows(); }
  int rank() const { return V.cols(); }
};

/// Orthogonal projection onto the tangent space: [[X, P], P].
/// Idempotent and self-adjoint for the Frobenius inner product.
TangentVector tangent_project(const GrassmannPoint& p, const SymMat& x);

/// [[G(P), P], P] — the projected ambient gradient.
TangentVector riemannian_grad(const ProblemInstance& inst, const GrassmannPoint& p);

/// Riemannian Hessian applied to a tangent vector:
/// [[G(P), X], P] - [[AXA, P], P], projected back to the tangent space.
/// Matrix-free by design; assembly would cost O(M^4) storage.
/// Throws if X fails the tangency invariant.
TangentVector hessian_apply(const ProblemInstance& inst, const GrassmannPoint& p,
                            const TangentVector& x);

/// Spectral retraction: projector onto the m dominant eigenvectors of
/// P + tX. First-order agreement |R_P(tX) - (P + tX)| = O(t^2).
/// Throws a retraction-degenerate error on an eigenvalue tie at the
/// m/m+1 split (measure-zero; advise a smaller step).
GrassmannPoint retract(const GrassmannPoint& p, const TangentVector& x, double t);

/// Orthonormal basis of Ran(P) (top-m eigenvectors).
StiefelPoint stiefel_lift(const GrassmannPoint& p);
GrassmannPoint stiefel_project(const StiefelPoint& v);

/// Riemannian gradient of V -> J(VV^T) in the embedded metric:
/// Z - V sym(V^T Z) with Z = 2 G(VV^T) V.
Mat stiefel_grad(const ProblemInstance& inst, const StiefelPoint& v);

/// Riemannian Hessian on the Stiefel manifold (embedded metric),
/// projection of the directional derivative of the ambient gradient
/// minus the Weingarten term.
Mat stiefel_hess(const ProblemInstance& inst, const StiefelPoint& v, const Mat& xi);

/// Projection onto the Stiefel tangent space at V.
Mat stiefel_tangent_project(const StiefelPoint& v, const Mat& x);

/// Thin-QR retraction with positive R diagonal for determinism.
/// Throws a step-too-large error if V + Xi is rank deficient.
StiefelPoint stiefel_retract(const StiefelPoint& v, const Mat& xi);

namespace detail {
/// Unvalidated workhorses used by the solver inner loops.
SymMat tproject(const SymMat& p, const SymMat& x);
SymMat hess_apply(const ProblemInstance& inst, const SymMat& p, const SymMat& g, const SymMat& x);
}  // namespace detail

}  // namespace grassmin
