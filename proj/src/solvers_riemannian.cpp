#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "grassmin/solvers.hpp"

namespace grassmin {

namespace {

/// Steihaug truncated CG on a generic tangent space. VecT needs +, -,
/// double*, frob_dot. Returns the step and whether it hit the boundary.
template <typename VecT, typename HessFn>
std::pair<VecT, bool> steihaug_tcg(const VecT& grad, HessFn&& hess, double radius,
                                   double rel_tol, int max_cg) {
  VecT z = 0.0 * grad;
  VecT r = grad;
  VecT d = -1.0 * grad;
  double rr = frob_dot(r, r);
  const double gnorm = std::sqrt(rr);
  if (gnorm == 0.0) return {z, false};

  const auto boundary_step = [&](const VecT& z0, const VecT& dir) {
    const double zz = frob_dot(z0, z0);
    const double zd = frob_dot(z0, dir);
    const double dd = frob_dot(dir, dir);
    const double disc = std::max(zd * zd + dd * (radius * radius - zz), 0.0);
    const double tau = (-zd + std::sqrt(disc)) / std::max(dd, 1e-300);
    return z0 + tau * dir;
  };

  for (int j = 0; j < max_cg; ++j) {
    const VecT hd = hess(d);
    const double dhd = frob_dot(d, hd);
    if (dhd <= 0.0) return {boundary_step(z, d), true};
    const double alpha = rr / dhd;
    const VecT z_next = z + alpha * d;
    if (std::sqrt(frob_dot(z_next, z_next)) >= radius) return {boundary_step(z, d), true};
    z = z_next;
    r += alpha * hd;
    const double rr_next = frob_dot(r, r);
    if (std::sqrt(rr_next) <= rel_tol * gnorm) return {z, false};
    d = -1.0 * r + (rr_next / rr) * d;
    rr = rr_next;
  }
  return {z, false};
}

/// Classical trust-region loop over an adapter providing the manifold
/// pieces. Adapter interface:
///   PointT; value(x); GradT grad(x); hess(x, v); retract(x, v) ->
///   optional<PointT> (nullopt if the retraction rejects the step);
///   record_point(report, x).
template <typename Adapter>
SolveReport trust_region_loop(Adapter&& ad, typename std::decay_t<Adapter>::Point x,
                              const SolverOptions& opts) {
  SolveReport rep;
  double radius = opts.tr_radius_init;
  double f = ad.value(x);
  const int max_cg = 250;

  for (int k = 0; k <= opts.max_iter; ++k) {
    auto g = ad.grad(x);
    const double gnorm = std::sqrt(frob_dot(g, g));
    rep.trace.push_back({k, f, gnorm, radius});
    rep.iterations = k;
    ad.record_point(rep, x, f, gnorm);

    if (gnorm <= opts.residual_tol) {
      rep.status = SolveStatus::converged;
      return rep;
    }
    if (k == opts.max_iter) break;

    auto hess = [&](const auto& v) { return ad.hess(x, v); };
    auto [step, hit_boundary] = steihaug_tcg(g, hess, radius, opts.tcg_rel_tol, max_cg);
    const double step_norm = std::sqrt(frob_dot(step, step));
    if (step_norm == 0.0) {
      rep.status = SolveStatus::stalled;
      return rep;
    }

    const double model_red = -(frob_dot(g, step) + 0.5 * frob_dot(step, ad.hess(x, step)));
    auto x_try = ad.retract(x, step);
    double rho = -1.0;
    double f_try = f;
    if (x_try && model_red > 0.0) {
      f_try = ad.value(*x_try);
      // regularize so that steps whose true reduction is below the
      // floating-point resolution of f still get accepted; without it
      // the radius collapses while the gradient sits above its floor
      const double reg = 1e3 * 2.220446049250313e-16 * std::max(1.0, std::fabs(f));
      rho = (f - f_try + reg) / (model_red + reg);
    }

    if (rho > 0.1) {
      x = std::move(*x_try);
      f = f_try;
    }
    if (rho < 0.1) {
      radius *= 0.25;
    } else if (rho > 0.75 && hit_boundary) {
      radius = std::min(2.0 * radius, opts.tr_radius_max);
    }
    if (radius < 1e-14) {
      rep.status = (gnorm <= opts.residual_tol) ? SolveStatus::converged : SolveStatus::stalled;
      return rep;
    }
  }
  rep.status = SolveStatus::max_iter;
  return rep;
}

struct GrassmannAdapter {
  using Point = GrassmannPoint;
  const ProblemInstance& inst;

  double value(const Point& p) const { return cost(inst, p.P); }
  SymMat grad(const Point& p) const { return detail::tproject(p.P, cost_grad(inst, p.P)); }
  SymMat hess(const Point& p, const SymMat& v) const {
    return detail::hess_apply(inst, p.P, cost_grad(inst, p.P), v);
  }
  std::optional<Point> retract(const Point& p, const SymMat& v) const {
    try {
      return grassmin::retract(p, TangentVector{p, v}, 1.0);
    } catch (const std::runtime_error&) {
      return std::nullopt;  // degenerate split: reject, shrink radius
    }
  }
  void record_point(SolveReport& rep, const Point& p, double f, double gnorm) const {
    rep.final_P = p;
    rep.final_objective = f;
    rep.final_residual = gnorm;
  }
};

struct StiefelAdapter {
  using Point = StiefelPoint;
  const ProblemInstance& inst;

  double value(const Point& v) const { return cost(inst, SymMat::from(v.V * transpose(v.V))); }
  Mat grad(const Point& v) const { return stiefel_grad(inst, v); }
  Mat hess(const Point& v, const Mat& xi) const { return stiefel_hess(inst, v, xi); }
  std::optional<Point> retract(const Point& v, const Mat& xi) const {
    try {
      return stiefel_retract(v, xi);
    } catch (const std::runtime_error&) {
      return std::nullopt;
    }
  }
  void record_point(SolveReport& rep, const Point& v, double f, double gnorm) const {
    rep.final_P = stiefel_project(v);
    rep.final_objective = f;
    rep.final_residual = gnorm;
  }
};

}  // namespace

SolveReport riemannian_descent(const ProblemInstance& inst, const GrassmannPoint& p0,
                               const SolverOptions& opts) {
  SolveReport rep;
  GrassmannPoint p = p0;
  double t_prev = 1.0;
  double best_f = std::numeric_limits<double>::infinity();
  double best_g = std::numeric_limits<double>::infinity();
  int no_progress = 0;

  for (int k = 0; k <= opts.max_iter; ++k) {
    const SymMat g = detail::tproject(p.P, cost_grad(inst, p.P));
    const double gnorm = frob_norm(g);
    const double f = cost(inst, p.P);
    rep.final_P = p;
    rep.final_objective = f;
    rep.final_residual = gnorm;
    rep.iterations = k;
    if (opts.record_iterates) rep.iterates.push_back(p.P);

    if (gnorm <= opts.residual_tol) {
      rep.trace.push_back({k, f, gnorm, 0.0});
      rep.status = SolveStatus::converged;
      return rep;
    }
    if (k == opts.max_iter) {
      rep.trace.push_back({k, f, gnorm, 0.0});
      break;
    }

    // a long plateau in both f and |g| means the method is at its
    // floating-point floor
    bool progress = false;
    if (f < best_f - 4.0 * 2.220446049250313e-16 * (1.0 + std::fabs(f))) {
      best_f = f;
      progress = true;
    }
    if (gnorm < 0.99 * best_g) {
      best_g = gnorm;
      progress = true;
    }
    if (progress) {
      no_progress = 0;
    } else if (++no_progress >= 100) {
      rep.trace.push_back({k, f, gnorm, 0.0});
      rep.status = SolveStatus::stalled;
      return rep;
    }

    const SymMat dir = -1.0 * g;
    double t = std::min(2.0 * t_prev, 1.0);
    bool accepted = false;
    // rounding slack: near the floor the true decrease c1 t |g|^2 is far
    // below the resolution of f, and the exact step always descends
    const double slack = 4.0 * 2.220446049250313e-16 * (1.0 + std::fabs(f));
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      try {
        GrassmannPoint cand = retract(p, TangentVector{p, dir}, t);
        if (cost(inst, cand.P) <= f - opts.armijo_c1 * t * gnorm * gnorm + slack) {
          rep.trace.push_back({k, f, gnorm, t});
          p = std::move(cand);
          t_prev = t;
          accepted = true;
          break;
        }
      } catch (const std::runtime_error&) {
        // degenerate retraction: treat as a failed trial step
      }
      t *= opts.backtrack;
    }
    if (!accepted) {
      rep.trace.push_back({k, f, gnorm, 0.0});
      rep.status = SolveStatus::stalled;
      return rep;
    }
  }
  rep.status = SolveStatus::max_iter;
  return rep;
}

SolveReport trust_region_grassmann(const ProblemInstance& inst, const GrassmannPoint& p0,
                                   const SolverOptions& opts) {
  return trust_region_loop(GrassmannAdapter{inst}, p0, opts);
}

SolveReport trust_region_stiefel(const ProblemInstance& inst, const StiefelPoint& v0,
                                 const SolverOptions& opts) {
  return trust_region_loop(StiefelAdapter{inst}, v0, opts);
}

}  // namespace grassmin
