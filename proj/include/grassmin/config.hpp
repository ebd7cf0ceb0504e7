#pragma once

namespace grassmin {

/// Central tolerance record. The gradient-norm stopping threshold is
/// exposed in SolverOptions; 1e-12 sits near double-precision noise for
/// the matrix sizes this library targets, so the default is 1e-10.
struct Tolerances {
  double feasibility = 1e-10;  ///< projector / density-matrix invariants
  double residual = 1e-10;     ///< first-order criticality
  double gap = 1e-8;           ///< spectral gap decisions (Aufbau, certificates)
};

inline const Tolerances& tols() {
  static const Tolerances t{};
  return t;
}

}  // namespace grassmin
