#pragma once

#include <cstdint>

#include "grassmin/eigh.hpp"
#include "grassmin/matrix.hpp"

namespace grassmin {

/// Rank-m orthogonal projector: P^2 = P = P^T, Tr P = m. A feasible
/// point of the nonconvex problem.
struct GrassmannPoint {
  int dim = 0;
  int rank = 0;
  SymMat P;

  /// Validates the projector invariants (idempotency and trace within
  /// the feasibility tolerance, 1 <= m <= M-1); throws on violation.
  static GrassmannPoint checked(SymMat p, int m);
  /// No validation; for points that are projectors by construction.
  static GrassmannPoint trusted(SymMat p, int m);

  double idempotency_defect() const;  ///< |P^2 - P|_F
};

/// Density matrix 0 <= D <= I, Tr D = m. A feasible point of the
/// relaxed problem on the convex hull of the Grassmannian.
struct ConvexPoint {
  int dim = 0;
  int trace_target = 0;
  SymMat D;

  /// Validates the spectral box and trace constraints; throws on violation.
  static ConvexPoint checked(SymMat d, int m);
  static ConvexPoint trusted(SymMat d, int m);
  static ConvexPoint uniform(int dim, int m);  ///< (m/M) I, strictly interior

  static ConvexPoint from_projector(const GrassmannPoint& p);
};

struct SpectralProjection {
  GrassmannPoint P;
  double gap;  ///< lambda_{m+1} - lambda_m of the source spectrum
};

/// Projector onto the m lowest eigenpairs. The gap may be ~0 for
/// degenerate spectra; the caller decides what to do with it.
SpectralProjection spectral_projector(const SpectralDecomp& s, int m);

/// Projector onto the m *largest* eigenpairs (occupations closest to 1).
SpectralProjection dominant_projector(const SpectralDecomp& s, int m);

/// P = QQ^T for Q the orthonormalization of an M x m standard Gaussian
/// matrix. Haar-invariant under orthogonal conjugation, deterministic
/// per seed; rank-deficient draws are redrawn internally.
GrassmannPoint random_grassmann(int dim, int m, std::uint64_t seed);

/// Strictly interior point of CH(M): a seeded convex combination of the
/// uniform point and a random projector.
ConvexPoint random_convex_interior(int dim, int m, std::uint64_t seed);

}  // namespace grassmin
