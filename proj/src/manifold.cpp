#include "grassmin/manifold.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "grassmin/config.hpp"

namespace grassmin {

namespace detail {

SymMat tproject(const SymMat& p, const SymMat& x) {
  const Mat xp = commutator(x.mat(), p.mat());
  return SymMat::from(commutator(xp, p.mat()));
}

SymMat hess_apply(const ProblemInstance& inst, const SymMat& p, const SymMat& g, const SymMat& x) {
  const Mat curvature = commutator(commutator(g.mat(), x.mat()), p.mat());
  const Mat axa = inst.A.mat() * x.mat() * inst.A.mat();
  const Mat quad = commutator(commutator(axa, p.mat()), p.mat());
  return tproject(p, SymMat::from(curvature - quad));
}

}  // namespace detail

namespace {

void check_tangency(const GrassmannPoint& p, const SymMat& x, const char* where) {
  const Mat& pm = p.P.mat();
  const double oo = frob_norm(pm * x.mat() * pm);
  const Mat ix = x.mat() - pm * x.mat();
  const double vv = frob_norm(ix - ix * pm);
  const double tol = 1e-7 * (1.0 + frob_norm(x));
  if (oo > tol || vv > tol)
    throw std::invalid_argument(std::string(where) + ": X violates tangency (|PXP| = " +
                                std::to_string(oo) + ", |(I-P)X(I-P)| = " + std::to_string(vv) +
                                ")");
}

}  // namespace

StiefelPoint StiefelPoint::checked(Mat v) {
  const Mat vtv = transpose(v) * v;
  const double defect = frob_norm(vtv - Mat::identity(v.cols()));
  if (defect > tols().feasibility)
    throw std::invalid_argument("StiefelPoint: |V^T V - I|_F = " + std::to_string(defect));
  return trusted(std::move(v));
}

StiefelPoint StiefelPoint::trusted(Mat v) {
  StiefelPoint s;
  s.V = std::move(v);
  return s;
}

TangentVector tangent_project(const GrassmannPoint& p, const SymMat& x) {
  check_same_shape(p.P.mat(), x.mat(), "tangent_project");
  return TangentVector{p, detail::tproject(p.P, x)};
}

TangentVector riemannian_grad(const ProblemInstance& inst, const GrassmannPoint& p) {
  return TangentVector{p, detail::tproject(p.P, cost_grad(inst, p.P))};
}

TangentVector hessian_apply(const ProblemInstance& inst, const GrassmannPoint& p,
                            const TangentVector& x) {
  check_tangency(p, x.X, "hessian_apply");
  return TangentVector{p, detail::hess_apply(inst, p.P, cost_grad(inst, p.P), x.X)};
}

GrassmannPoint retract(const GrassmannPoint& p, const TangentVector& x, double t) {
  check_same_shape(p.P.mat(), x.X.mat(), "retract");
  SymMat moved = p.P;
  moved += t * x.X;
  const SpectralDecomp s = eigh(moved);
  const SpectralProjection top = dominant_projector(s, p.rank);
  if (top.gap <= 1e-12)
    throw std::runtime_error("retract: eigenvalue tie at the m/m+1 split (gap " +
                             std::to_string(top.gap) + "); retry with a smaller step");
  return top.P;
}

StiefelPoint stiefel_lift(const GrassmannPoint& p) {
  const SpectralDecomp s = eigh(p.P);
  const int n = p.dim;
  Mat v(n, p.rank);
  for (int k = 0; k < p.rank; ++k)
    for (int i = 0; i < n; ++i) v(i, k) = s.Q(i, n - p.rank + k);
  return StiefelPoint::trusted(std::move(v));
}

GrassmannPoint stiefel_project(const StiefelPoint& v) {
  return GrassmannPoint::trusted(SymMat::from(v.V * transpose(v.V)), v.rank());
}

Mat stiefel_tangent_project(const StiefelPoint& v, const Mat& x) {
  const Mat vtx = transpose(v.V) * x;
  const Mat sym = 0.5 * (vtx + transpose(vtx));
  return x - v.V * sym;
}

Mat stiefel_grad(const ProblemInstance& inst, const StiefelPoint& v) {
  const SymMat p = SymMat::from(v.V * transpose(v.V));
  const Mat z = 2.0 * (cost_grad(inst, p).mat() * v.V);
  return stiefel_tangent_project(v, z);
}

Mat stiefel_hess(const ProblemInstance& inst, const StiefelPoint& v, const Mat& xi) {
  const SymMat p = SymMat::from(v.V * transpose(v.V));
  const SymMat g = cost_grad(inst, p);
  // ambient gradient Z(V) = 2 G(VV^T) V and its directional derivative:
  // dZ[xi] = 2 G(P) xi - 2 A (xi V^T + V xi^T) A V
  const Mat xvt = xi * transpose(v.V);
  const Mat sym_dp = xvt + transpose(xvt);
  const Mat dz = 2.0 * (g.mat() * xi) - 2.0 * (inst.A.mat() * sym_dp * (inst.A.mat() * v.V));
  const Mat z = 2.0 * (g.mat() * v.V);
  const Mat vtz = transpose(v.V) * z;
  const Mat sym_vtz = 0.5 * (vtz + transpose(vtz));
  return stiefel_tangent_project(v, dz - xi * sym_vtz);
}

StiefelPoint stiefel_retract(const StiefelPoint& v, const Mat& xi) {
  check_same_shape(v.V, xi, "stiefel_retract");
  const ThinQR qr = qr_thin(v.V + xi);
  if (qr.rank_deficient)
    throw std::runtime_error("stiefel_retract: V + Xi is rank deficient; step too large");
  return StiefelPoint::trusted(qr.Q);
}

}  // namespace grassmin
