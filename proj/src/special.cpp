#include "grassmin/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "grassmin/rng.hpp"

namespace grassmin {

namespace {

/// Off-diagonal mass of U^T X U relative to |X|.
double frame_offdiag(const Mat& u, const SymMat& x) {
  const Mat t = transpose(u) * x.mat() * u;
  double acc = 0.0;
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j)
      if (i != j) acc += t(i, j) * t(i, j);
  return std::sqrt(acc);
}

std::vector<double> frame_diagonal(const Mat& u, const SymMat& x) {
  const Mat t = transpose(u) * x.mat() * u;
  std::vector<double> d(static_cast<std::size_t>(t.rows()));
  for (int i = 0; i < t.rows(); ++i) d[static_cast<std::size_t>(i)] = t(i, i);
  return d;
}

/// Common eigenframe of two commuting symmetric matrices via a generic
/// shift: eigh(X + tau Y) diagonalizes both for all but measure-zero
/// tau. Disagreement is detected and retried with a fresh tau.
Mat simultaneous_frame(const SymMat& x, const SymMat& y) {
  const double scale = std::max(frob_norm(x) + frob_norm(y), 1e-300);
  Rng rng(0x5eedf00dULL + static_cast<std::uint64_t>(x.dim()));
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double tau = 0.5 + rng.uniform();  // generic in [0.5, 1.5)
    SymMat combo = x;
    combo += tau * y;
    const SpectralDecomp s = eigh(combo);
    const double off = frame_offdiag(s.Q, x) + frame_offdiag(s.Q, y);
    if (off <= 1e-9 * scale) return s.Q;
  }
  throw std::runtime_error("simultaneous_frame: could not co-diagonalize (matrices may not commute)");
}

}  // namespace

CommutingSolution solve_commuting(const ProblemInstance& inst, double tol_commute) {
  const double comm = frob_norm(commutator(inst.A.mat(), inst.B.mat()));
  const double scale = std::max(frob_norm(inst.A) * frob_norm(inst.B), 1e-300);
  if (comm > tol_commute * scale)
    throw std::invalid_argument(
        "solve_commuting: |[A,B]| = " + std::to_string(comm) + " exceeds " +
        std::to_string(tol_commute * scale) +
        "; A and B do not commute - use the iterative solvers instead");

  Mat u = simultaneous_frame(inst.A, inst.C);
  std::vector<double> c = frame_diagonal(u, inst.C);

  // order the frame by ascending c
  const int n = inst.M;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return c[static_cast<std::size_t>(i)] < c[static_cast<std::size_t>(j)];
  });
  Mat u_sorted(n, n);
  std::vector<double> c_sorted(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    c_sorted[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(src)];
    for (int i = 0; i < n; ++i) u_sorted(i, k) = u(i, src);
  }

  CommutingSolution out;
  out.c = c_sorted;
  const int m = inst.m;
  out.gap = c_sorted[static_cast<std::size_t>(m)] - c_sorted[static_cast<std::size_t>(m - 1)];

  Mat occ(n, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i) occ(i, k) = u_sorted(i, k);
  out.P_star = GrassmannPoint::trusted(SymMat::from(occ * transpose(occ)), m);

  const double cluster_tol = 1e-9 * (1.0 + std::fabs(c_sorted.back() - c_sorted.front()));
  out.degenerate = out.gap <= cluster_tol;
  if (out.degenerate) {
    // the tied eigenspace of c_m and the count of strictly lower levels
    const double cm = c_sorted[static_cast<std::size_t>(m - 1)];
    int lo = m - 1;
    while (lo > 0 && cm - c_sorted[static_cast<std::size_t>(lo - 1)] <= cluster_tol) --lo;
    int hi = m - 1;
    while (hi < n - 1 && c_sorted[static_cast<std::size_t>(hi + 1)] - cm <= cluster_tol) ++hi;
    out.occupied_below = lo;
    out.tied_basis = Mat(n, hi - lo + 1);
    for (int k = lo; k <= hi; ++k)
      for (int i = 0; i < n; ++i) out.tied_basis(i, k - lo) = u_sorted(i, k);
  }
  return out;
}

PerturbationInstance PerturbationInstance::build(SymMat a0, SymMat b0, SymMat a1, SymMat b1,
                                                 int m) {
  const double comm = frob_norm(commutator(a0.mat(), b0.mat()));
  const double scale = std::max(frob_norm(a0) * frob_norm(b0), 1e-300);
  if (comm > 1e-10 * scale)
    throw std::invalid_argument("PerturbationInstance: [A0, B0] != 0 (|[A0,B0]| = " +
                                std::to_string(comm) + ")");
  check_same_shape(a0.mat(), b0.mat(), "PerturbationInstance");
  check_same_shape(a0.mat(), a1.mat(), "PerturbationInstance");
  check_same_shape(a0.mat(), b1.mat(), "PerturbationInstance");

  const ProblemInstance base = ProblemInstance::from_AB(a0, b0, m);
  const Mat u = simultaneous_frame(base.A, base.C);
  const std::vector<double> c = frame_diagonal(u, base.C);
  const int n = a0.dim();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return c[static_cast<std::size_t>(i)] < c[static_cast<std::size_t>(j)];
  });

  PerturbationInstance pi;
  pi.frame = Mat(n, n);
  pi.c0.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    pi.c0[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(src)];
    for (int i = 0; i < n; ++i) pi.frame(i, k) = u(i, src);
  }
  const double gap = pi.c0[static_cast<std::size_t>(m)] - pi.c0[static_cast<std::size_t>(m - 1)];
  if (gap <= 0.0)
    throw std::invalid_argument("PerturbationInstance: no gap c_m < c_{m+1} (gap " +
                                std::to_string(gap) + "); the expansion is invalid");

  pi.a0 = frame_diagonal(pi.frame, a0);
  pi.A0 = std::move(a0);
  pi.B0 = std::move(b0);
  pi.A1 = std::move(a1);
  pi.B1 = std::move(b1);
  pi.m = m;
  return pi;
}

FirstOrderExpansion perturb_first_order(const PerturbationInstance& pi) {
  const int n = pi.A0.dim();
  const int m = pi.m;
  const double gap = pi.c0[static_cast<std::size_t>(m)] - pi.c0[static_cast<std::size_t>(m - 1)];
  if (gap <= 0.0)
    throw std::invalid_argument("perturb_first_order: gap condition violated (gap " +
                                std::to_string(gap) + ")");

  Mat occ(n, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i) occ(i, k) = pi.frame(i, k);
  GrassmannPoint p0 = GrassmannPoint::trusted(SymMat::from(occ * transpose(occ)), m);

  const Mat a1f = transpose(pi.frame) * pi.A1.mat() * pi.frame;
  const Mat b1f = transpose(pi.frame) * pi.B1.mat() * pi.frame;

  // the ov correction solves D_ij (P1_ov)_ij = -(B1_ov - a0_i A1_ov)_ij
  // with the strictly positive denominators D_ij; the sign is pinned by
  // the linearized stationarity equation (and checked numerically
  // against exact 2x2 minimizers in the tests)
  Mat p1f(n, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n - m; ++j) {
      const double ai = pi.a0[static_cast<std::size_t>(i)];
      const double aj = pi.a0[static_cast<std::size_t>(m + j)];
      const double denom = pi.c0[static_cast<std::size_t>(m + j)] - pi.c0[static_cast<std::size_t>(i)] +
                           0.5 * (aj - ai) * (aj - ai);
      const double val = -(b1f(i, m + j) - ai * a1f(i, m + j)) / denom;
      p1f(i, m + j) = val;
      p1f(m + j, i) = val;
    }
  }
  const SymMat p1 = SymMat::from(pi.frame * p1f * transpose(pi.frame));
  return {std::move(p0), p1};
}

AngleScan bruteforce_angle_2x2(const ProblemInstance& inst, int grid_size) {
  if (inst.M != 2 || inst.m != 1)
    throw std::invalid_argument("bruteforce_angle_2x2: needs M = 2, m = 1, got M = " +
                                std::to_string(inst.M) + ", m = " + std::to_string(inst.m));
  constexpr double two_pi = 6.283185307179586476925286766559;

  const auto p_of = [](double theta) {
    const double x = std::sin(theta);
    const double z = std::cos(theta);
    Mat p(2, 2, {0.5 * (1.0 + z), 0.5 * x, 0.5 * x, 0.5 * (1.0 - z)});
    return SymMat::from_exact(std::move(p));
  };
  const auto j_of = [&](double theta) { return cost(inst, p_of(theta)); };

  AngleScan out;
  out.samples.reserve(static_cast<std::size_t>(grid_size));
  int best_idx = 0;
  double best_val = j_of(0.0);
  for (int i = 0; i < grid_size; ++i) {
    const double theta = two_pi * i / grid_size;
    const double val = j_of(theta);
    out.samples.emplace_back(theta, val);
    if (val < best_val) {
      best_val = val;
      best_idx = i;
    }
  }

  // golden-section refinement around the best grid point
  const double h = two_pi / grid_size;
  double a = two_pi * best_idx / grid_size - h;
  double b = two_pi * best_idx / grid_size + h;
  const double invphi = 0.61803398874989484820458683436564;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = j_of(x1);
  double f2 = j_of(x2);
  while (b - a > 1e-12) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = j_of(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = j_of(x2);
    }
  }
  double theta_star = 0.5 * (a + b);
  double j_star = j_of(theta_star);
  if (best_val < j_star) {  // guard: refinement can only improve
    theta_star = two_pi * best_idx / grid_size;
    j_star = best_val;
  }
  if (theta_star < 0.0) theta_star += two_pi;
  out.theta_star = theta_star;
  out.J_star = j_star;
  return out;
}

}  // namespace grassmin
