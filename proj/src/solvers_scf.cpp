#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "grassmin/solvers.hpp"

namespace grassmin {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::two_cycle: return "two_cycle";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::stalled: return "stalled";
  }
  return "unknown";
}

namespace {

/// Shared fixed-point loop for the Roothaan map on either cost. The
/// map replaces P by the lowest-m spectral projector of grad(P); the
/// two instantiations differ only in the gradient matrix and in the
/// objective recorded in the trace.
template <typename GradFn, typename CostFn>
SolveReport roothaan_loop(const ProblemInstance& inst, const GrassmannPoint& p0,
                          const SolverOptions& opts, GradFn grad_fn, CostFn cost_fn) {
  SolveReport rep;
  GrassmannPoint p = p0;
  std::deque<SymMat> history;  // most recent last
  double gap = 0.0;

  for (int k = 0; k <= opts.max_iter; ++k) {
    const SymMat g = grad_fn(p.P);
    const double res = residual(inst, p.P);
    const double obj = cost_fn(p.P);
    rep.trace.push_back({k, obj, res, 1.0});
    if (opts.record_iterates) rep.iterates.push_back(p.P);
    rep.final_P = p;
    rep.final_objective = obj;
    rep.final_residual = res;
    rep.iterations = k;

    const SpectralDecomp s = eigh(g);
    const SpectralProjection next = spectral_projector(s, inst.m);
    gap = next.gap;
    rep.aufbau_gap = gap;

    // converged means stationary for the *map*, not merely first-order
    // critical: the iteration escapes local maxima and saddles where
    // [G, P] also vanishes, and must not stop there.
    const double map_step = frob_norm(next.P.P - p.P);
    if (res <= opts.residual_tol && map_step <= opts.cycle_tol) {
      rep.status = SolveStatus::converged;
      return rep;
    }
    if (k == opts.max_iter) break;

    if (gap <= opts.gap_tol)
      rep.warnings.push_back("degenerate Aufbau step at iteration " + std::to_string(k) +
                             " (gap " + std::to_string(gap) + "); deterministic lowest-m kept");

    // 2-cycle: P_{k+1} ~ P_{k-1} while P_{k+1} differs from P_k
    if (!history.empty()) {
      const double to_prev = frob_norm(next.P.P - p.P);
      const double to_prev2 = frob_norm(next.P.P - history.back());
      if (to_prev2 <= opts.cycle_tol && to_prev > opts.cycle_tol) {
        rep.status = SolveStatus::two_cycle;
        rep.cycle_points = {p, next.P};
        rep.final_P = next.P;
        rep.final_objective = cost_fn(next.P.P);
        rep.final_residual = residual(inst, next.P.P);
        rep.iterations = k + 1;
        rep.trace.push_back({k + 1, rep.final_objective, rep.final_residual, 1.0});
        if (opts.record_iterates) rep.iterates.push_back(next.P.P);
        return rep;
      }
    }
    history.push_back(p.P);
    if (static_cast<int>(history.size()) > opts.cycle_window) history.pop_front();
    p = next.P;
  }

  rep.status = SolveStatus::max_iter;
  return rep;
}

}  // namespace

SolveReport roothaan(const ProblemInstance& inst, const GrassmannPoint& p0,
                     const SolverOptions& opts) {
  return roothaan_loop(
      inst, p0, opts, [&](const SymMat& p) { return cost_grad(inst, p); },
      [&](const SymMat& p) { return cost(inst, p); });
}

SolveReport roothaan_tilde(const ProblemInstance& inst, const GrassmannPoint& p0,
                           const SolverOptions& opts) {
  return roothaan_loop(
      inst, p0, opts, [&](const SymMat& p) { return relaxed_grad(inst, p); },
      [&](const SymMat& p) { return relaxed_cost(inst, p); });
}

SolveReport oda(const ProblemInstance& inst, const ConvexPoint& d0, const SolverOptions& opts) {
  SolveReport rep;
  SymMat d = d0.D;
  std::deque<SymMat> history;

  for (int k = 0; k <= opts.max_iter; ++k) {
    const SymMat g = cost_grad(inst, d);
    const double res = frob_norm(commutator(g.mat(), d.mat()));
    const double obj = cost(inst, d);
    if (opts.record_iterates) rep.iterates.push_back(d);
    rep.final_D = ConvexPoint::trusted(d, inst.m);
    rep.final_objective = obj;
    rep.final_residual = res;
    rep.iterations = k;

    const SpectralDecomp s = eigh(g);
    const SpectralProjection aufbau = spectral_projector(s, inst.m);
    rep.aufbau_gap = aufbau.gap;
    const SymMat dir = aufbau.P.P - d;

    // same map-stationarity convergence test as roothaan, so the two
    // iterate sequences stay aligned from a shared manifold start
    if (res <= opts.residual_tol && frob_norm(dir) <= opts.cycle_tol) {
      rep.trace.push_back({k, obj, res, 0.0});
      rep.status = SolveStatus::converged;
      return rep;
    }
    if (k == opts.max_iter) {
      rep.trace.push_back({k, obj, res, 0.0});
      break;
    }

    if (aufbau.gap <= opts.gap_tol)
      rep.warnings.push_back("degenerate Aufbau step at iteration " + std::to_string(k) +
                             " (gap " + std::to_string(aufbau.gap) + ")");
    // exact line search on the segment: f(t) = a_k t^2 + b_k t + c_k with
    // a_k = -1/2 |A^{1/2} dir A^{1/2}|^2 <= 0 and b_k = Tr(G dir) <= 0,
    // a concave parabola whose minimum on [0,1] sits at t = 1. Both
    // signs are asserted each iteration; the step is always full, which
    // keeps the iterate sequence identical to roothaan's.
    const double b = frob_dot(g, dir);
    const Mat a_dir = inst.A.mat() * dir.mat();
    const double a_quad = -0.5 * frob_dot(a_dir, transpose(a_dir));
    const double a_scale = 1.0 + frob_norm(inst.A) * frob_norm(inst.A);
    if (a_quad > 1e-12 * a_scale)
      throw std::runtime_error("oda: line-search curvature a_k = " + std::to_string(a_quad) +
                               " > 0 violates the concavity guarantee");
    if (b > 1e-12 * (1.0 + frob_norm(g) * frob_norm(dir)))
      throw std::runtime_error("oda: linear slope b_k = " + std::to_string(b) +
                               " > 0; the Aufbau direction must not ascend");
    const double alpha = 1.0;
    rep.trace.push_back({k, obj, res, alpha});
    const SymMat next = aufbau.P.P;

    if (!history.empty()) {
      const double to_prev = frob_norm(next - d);
      const double to_prev2 = frob_norm(next - history.back());
      if (to_prev2 <= opts.cycle_tol && to_prev > opts.cycle_tol) {
        rep.status = SolveStatus::two_cycle;
        rep.cycle_points = {GrassmannPoint::trusted(d, inst.m),
                            GrassmannPoint::trusted(next, inst.m)};
        rep.final_D = ConvexPoint::trusted(next, inst.m);
        rep.iterations = k + 1;
        return rep;
      }
    }
    history.push_back(d);
    if (static_cast<int>(history.size()) > opts.cycle_window) history.pop_front();
    d = next;
  }

  rep.status = SolveStatus::max_iter;
  return rep;
}

}  // namespace grassmin
