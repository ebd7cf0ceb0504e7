#include "grassmin/points.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "grassmin/config.hpp"
#include "grassmin/rng.hpp"

namespace grassmin {

namespace {

void check_rank_range(int m, int dim, const char* what) {
  if (m < 1 || m > dim - 1)
    throw std::invalid_argument(std::string(what) + ": rank " + std::to_string(m) +
                                " out of range [1, " + std::to_string(dim - 1) + "]");
}

}  // namespace

GrassmannPoint GrassmannPoint::checked(SymMat p, int m) {
  check_rank_range(m, p.dim(), "GrassmannPoint");
  GrassmannPoint g = trusted(std::move(p), m);
  const double tol = tols().feasibility;
  const double defect = g.idempotency_defect();
  if (defect > tol)
    throw std::invalid_argument("GrassmannPoint: |P^2 - P|_F = " + std::to_string(defect) +
                                " exceeds " + std::to_string(tol));
  const double tr_err = std::fabs(trace(g.P) - m);
  if (tr_err > tol)
    throw std::invalid_argument("GrassmannPoint: |Tr P - m| = " + std::to_string(tr_err) +
                                " exceeds " + std::to_string(tol));
  return g;
}

GrassmannPoint GrassmannPoint::trusted(SymMat p, int m) {
  GrassmannPoint g;
  g.dim = p.dim();
  g.rank = m;
  g.P = std::move(p);
  return g;
}

double GrassmannPoint::idempotency_defect() const {
  return frob_norm(P.mat() * P.mat() - P.mat());
}

ConvexPoint ConvexPoint::checked(SymMat d, int m) {
  check_rank_range(m, d.dim(), "ConvexPoint");
  const double tol = tols().feasibility;
  const SpectralDecomp s = eigh(d);
  const double lo = s.eigenvalues.front();
  const double hi = s.eigenvalues.back();
  if (lo < -tol || hi > 1.0 + tol)
    throw std::invalid_argument("ConvexPoint: spectrum [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] leaves [0, 1] beyond tolerance");
  const double tr_err = std::fabs(trace(d) - m);
  if (tr_err > tol)
    throw std::invalid_argument("ConvexPoint: |Tr D - m| = " + std::to_string(tr_err) +
                                " exceeds " + std::to_string(tol));
  return trusted(std::move(d), m);
}

ConvexPoint ConvexPoint::trusted(SymMat d, int m) {
  ConvexPoint c;
  c.dim = d.dim();
  c.trace_target = m;
  c.D = std::move(d);
  return c;
}

ConvexPoint ConvexPoint::uniform(int dim, int m) {
  check_rank_range(m, dim, "ConvexPoint::uniform");
  return trusted((static_cast<double>(m) / dim) * SymMat::identity(dim), m);
}

ConvexPoint ConvexPoint::from_projector(const GrassmannPoint& p) {
  return trusted(p.P, p.rank);
}

SpectralProjection spectral_projector(const SpectralDecomp& s, int m) {
  check_rank_range(m, s.dim(), "spectral_projector");
  SpectralProjection out;
  out.P = GrassmannPoint::trusted(s.projector(0, m), m);
  out.gap = s.eigenvalues[static_cast<std::size_t>(m)] -
            s.eigenvalues[static_cast<std::size_t>(m - 1)];
  return out;
}

SpectralProjection dominant_projector(const SpectralDecomp& s, int m) {
  const int n = s.dim();
  check_rank_range(m, n, "dominant_projector");
  SpectralProjection out;
  out.P = GrassmannPoint::trusted(s.projector(n - m, n), m);
  out.gap = s.eigenvalues[static_cast<std::size_t>(n - m)] -
            s.eigenvalues[static_cast<std::size_t>(n - m - 1)];
  return out;
}

GrassmannPoint random_grassmann(int dim, int m, std::uint64_t seed) {
  check_rank_range(m, dim, "random_grassmann");
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Mat g = gaussian_mat(rng, dim, m);
    const ThinQR qr = qr_thin(g);
    if (qr.rank_deficient) continue;
    Mat p = qr.Q * transpose(qr.Q);
    return GrassmannPoint::trusted(SymMat::from(p), m);
  }
  throw std::runtime_error("random_grassmann: repeated rank-deficient Gaussian draws");
}

ConvexPoint random_convex_interior(int dim, int m, std::uint64_t seed) {
  check_rank_range(m, dim, "random_convex_interior");
  Rng rng(seed);
  const double t = 0.25 + 0.5 * rng.uniform();
  const GrassmannPoint p = random_grassmann(dim, m, split_seed(seed, 1));
  SymMat d = (1.0 - t) * SymMat::identity(dim);
  d *= static_cast<double>(m) / dim;
  d += t * p.P;
  return ConvexPoint::trusted(std::move(d), m);
}

}  // namespace grassmin
