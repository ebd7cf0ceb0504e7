#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grassmin/manifold.hpp"
#include "grassmin/objective.hpp"
#include "grassmin/points.hpp"

namespace grassmin {

struct SolverOptions {
  int max_iter = 10000;
  double residual_tol = 1e-10;   ///< first-order stopping (gradient / FW gap)
  int cycle_window = 8;          ///< sliding window for 2-cycle detection
  double cycle_tol = 1e-9;
  std::uint64_t seed = 0;
  double gap_tol = 1e-8;         ///< degenerate-Aufbau warning threshold

  // Armijo line search (riemannian_descent)
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;

  // trust region
  double tr_radius_init = 1.0;
  double tr_radius_max = 32.0;
  double tcg_rel_tol = 0.1;

  // convex ODA: active-face refinement after the damping loop
  bool polish = true;
  int polish_max_rounds = 60;

  bool record_iterates = false;  ///< store every iterate (tests only)
};

enum class SolveStatus { converged, two_cycle, max_iter, stalled };

const char* to_string(SolveStatus s);

/// One row per iteration: objective, first-order residual (gradient
/// norm for manifold methods, Frank-Wolfe gap for the convex solver),
/// and the step / damping coefficient of the move out of this iterate.
struct TraceRow {
  int iter;
  double objective;
  double residual;
  double step;
};

struct SolveReport {
  SolveStatus status = SolveStatus::max_iter;
  int iterations = 0;
  std::optional<GrassmannPoint> final_P;
  std::optional<ConvexPoint> final_D;
  double final_objective = 0.0;
  double final_residual = 0.0;
  double aufbau_gap = 0.0;  ///< spectral gap of the last gradient matrix at m
  std::vector<TraceRow> trace;
  std::optional<std::pair<GrassmannPoint, GrassmannPoint>> cycle_points;
  std::vector<std::string> warnings;
  std::vector<SymMat> iterates;  ///< filled only when record_iterates
};

/// Global-optimality certificate built from the convex relaxation.
/// certified implies gap > gap_tol and P_star present and feasible;
/// the certificate then asserts P_star is the unique global minimizer
/// of the nonconvex problem.
struct Certificate {
  SymMat H_star;
  std::vector<double> mu;
  double gap = 0.0;
  bool certified = false;
  std::optional<GrassmannPoint> P_star;
};

/// Fixed-point SCF iteration: P_{k+1} is the projector onto the m
/// lowest eigenpairs of G(P_k). The cost sequence is non-increasing;
/// a genuine 2-cycle here would contradict that and is reported so
/// tests can flag it.
SolveReport roothaan(const ProblemInstance& inst, const GrassmannPoint& p0,
                     const SolverOptions& opts = {});

/// Optimal damping on J over the convex hull. The exact line search
/// closes in a concave parabola whose minimum on [0,1] is alpha = 1,
/// so from a manifold start the iterates coincide with roothaan's
/// (asserted each iteration through the sign of the quadratic
/// coefficient).
SolveReport oda(const ProblemInstance& inst, const ConvexPoint& d0,
                const SolverOptions& opts = {});

/// Optimal damping on the convexified cost over the convex hull,
/// followed (by default) by an active-face refinement that drives the
/// degenerate cases to machine precision. Returns the minimizer D_star
/// and the Aufbau gap of Gt(D_star).
SolveReport oda_convex(const ProblemInstance& inst, const ConvexPoint& d0,
                       const SolverOptions& opts = {});

/// The Roothaan fixed-point map applied to the convexified cost. May
/// legitimately oscillate; a detected 2-cycle reports both accumulation
/// points instead of failing.
SolveReport roothaan_tilde(const ProblemInstance& inst, const GrassmannPoint& p0,
                           const SolverOptions& opts = {});

/// Steepest descent with Armijo backtracking along the spectral
/// retraction. First-order baseline.
SolveReport riemannian_descent(const ProblemInstance& inst, const GrassmannPoint& p0,
                               const SolverOptions& opts = {});

/// Riemannian trust region with a Steihaug truncated-CG subproblem
/// (stop on negative curvature, trust-region boundary, or relative
/// residual 0.1; accept rho > 0.1, expand rho > 0.75 at the boundary,
/// shrink by 0.25).
SolveReport trust_region_grassmann(const ProblemInstance& inst, const GrassmannPoint& p0,
                                   const SolverOptions& opts = {});
SolveReport trust_region_stiefel(const ProblemInstance& inst, const StiefelPoint& v0,
                                 const SolverOptions& opts = {});

/// Builds the certificate at an (approximate) minimizer of the relaxed
/// problem. The input is validated through its Frank-Wolfe gap — the
/// constancy of H_star holds only on the true solution set — and an
/// off-solution input is rejected with an invalid-argument error.
Certificate certify_global(const ProblemInstance& inst, const ConvexPoint& d_star,
                           double gap_tol = 1e-8, double check_tol = 1e-6);

enum class LocalMethod {
  roothaan,
  oda,
  oda_convex,
  roothaan_tilde,
  rgd,
  tr_grassmann,
  tr_stiefel,
};

const char* to_string(LocalMethod m);
std::optional<LocalMethod> parse_method(const std::string& name);

struct MultistartResult {
  SolveReport best;
  int best_index = -1;
  std::vector<double> all_J;
};

/// Dispatches one local solve from a manifold start (convex methods
/// take the projector as their initial density matrix).
SolveReport run_local(const ProblemInstance& inst, LocalMethod method, const GrassmannPoint& p0,
                      const SolverOptions& opts = {});

/// Runs the local method from n Haar-random starts derived from one
/// master seed and keeps the lowest final objective (first index wins
/// ties). Runs are independent; results are merged by one reducer.
MultistartResult multistart(const ProblemInstance& inst, int n_starts, std::uint64_t seed,
                            LocalMethod method, const SolverOptions& opts = {});

}  // namespace grassmin
