#include "grassmin/eigh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "grassmin/kernels.hpp"

namespace grassmin {

namespace {

/// Largest |off-diagonal| and off-diagonal Frobenius mass of a square matrix.
double offdiag_norm(const Mat& a) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) acc += a(i, j) * a(i, j);
  return std::sqrt(2.0 * acc);
}

void sign_fix_rows(Mat& vt) {
  for (int r = 0; r < vt.rows(); ++r) {
    double* row = vt.row(r);
    int imax = 0;
    double vmax = 0.0;
    for (int j = 0; j < vt.cols(); ++j) {
      const double av = std::fabs(row[j]);
      if (av > vmax) {
        vmax = av;
        imax = j;
      }
    }
    if (row[imax] < 0.0) kernels::active().scal(row, -1.0, static_cast<std::size_t>(vt.cols()));
  }
}

}  // namespace

SymMat SpectralDecomp::projector(int lo, int hi) const {
  const int n = dim();
  Mat p(n, n);
  for (int k = lo; k < hi; ++k) {
    for (int i = 0; i < n; ++i) {
      const double qik = Q(i, k);
      for (int j = i; j < n; ++j) p(i, j) += qik * Q(j, k);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) p(j, i) = p(i, j);
  return SymMat::from_exact(std::move(p));
}

SpectralDecomp eigh(const SymMat& x) {
  const int n = x.dim();
  Mat a = x.mat();
  Mat vt = Mat::identity(n);  // rows are eigenvector candidates
  const auto& ops = kernels::active();

  const double scale = std::max(frob_norm(a), 1e-300);
  const double off_tol = 1e-14 * scale;
  const int max_sweeps = 60;

  int sweep = 0;
  while (offdiag_norm(a) > off_tol) {
    if (++sweep > max_sweeps)
      throw std::runtime_error(
          "eigh: Jacobi failed to converge in " + std::to_string(max_sweeps) +
          " sweeps (dim " + std::to_string(n) + ", |A|_F " + std::to_string(scale) +
          ", offdiag " + std::to_string(offdiag_norm(a)) + ")");
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= 1e-2 * off_tol / n) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        ops.plane_rot(a.row(p), a.row(q), c, s, static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        ops.plane_rot(vt.row(p), vt.row(q), c, s, static_cast<std::size_t>(n));
      }
    }
  }

  sign_fix_rows(vt);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  SpectralDecomp out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.Q = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[static_cast<std::size_t>(k)] = a(src, src);
    for (int i = 0; i < n; ++i) out.Q(i, k) = vt(src, i);
  }
  return out;
}

ThinQR qr_thin(const Mat& a, double rank_tol) {
  const int m = a.rows();
  const int n = a.cols();
  if (m < n) throw std::invalid_argument("qr_thin: need rows >= cols, got " + format_dims(a));

  Mat r = a;                      // reduced in place to R (top n x n block)
  std::vector<Mat> reflectors;    // Householder vectors, column form
  reflectors.reserve(static_cast<std::size_t>(n));
  const double scale = std::max(frob_norm(a), 1e-300);

  for (int k = 0; k < n; ++k) {
    double norm_x = 0.0;
    for (int i = k; i < m; ++i) norm_x += r(i, k) * r(i, k);
    norm_x = std::sqrt(norm_x);

    Mat v(m, 1);
    if (norm_x > 0.0) {
      const double alpha = (r(k, k) >= 0.0) ? -norm_x : norm_x;
      for (int i = k; i < m; ++i) v(i, 0) = r(i, k);
      v(k, 0) -= alpha;
      double vnorm = 0.0;
      for (int i = k; i < m; ++i) vnorm += v(i, 0) * v(i, 0);
      vnorm = std::sqrt(vnorm);
      if (vnorm > 0.0)
        for (int i = k; i < m; ++i) v(i, 0) /= vnorm;
      // apply I - 2vv^T to remaining columns
      for (int j = k; j < n; ++j) {
        double d = 0.0;
        for (int i = k; i < m; ++i) d += v(i, 0) * r(i, j);
        for (int i = k; i < m; ++i) r(i, j) -= 2.0 * d * v(i, 0);
      }
    }
    reflectors.push_back(std::move(v));
  }

  ThinQR out;
  out.R = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.R(i, j) = r(i, j);

  // Q = H_0 ... H_{n-1} * [I_n; 0]
  out.Q = Mat(m, n);
  for (int j = 0; j < n; ++j) out.Q(j, j) = 1.0;
  for (int k = n - 1; k >= 0; --k) {
    const Mat& v = reflectors[static_cast<std::size_t>(k)];
    for (int j = 0; j < n; ++j) {
      double d = 0.0;
      for (int i = k; i < m; ++i) d += v(i, 0) * out.Q(i, j);
      for (int i = k; i < m; ++i) out.Q(i, j) -= 2.0 * d * v(i, 0);
    }
  }

  for (int i = 0; i < n; ++i) {
    if (out.R(i, i) < 0.0) {
      for (int j = i; j < n; ++j) out.R(i, j) = -out.R(i, j);
      for (int r2 = 0; r2 < m; ++r2) out.Q(r2, i) = -out.Q(r2, i);
    }
    if (std::fabs(out.R(i, i)) <= rank_tol * scale) out.rank_deficient = true;
  }
  return out;
}

ThinSVD svd_thin(const Mat& a) {
  const int m = a.rows();
  const int n = a.cols();
  Mat w = a;  // columns orthogonalized in place

  const double scale2 = std::max(frob_dot(a, a), 1e-300);
  const double tol = 1e-28 * scale2;
  const int max_sweeps = 60;
  bool rotated = true;
  int sweep = 0;
  while (rotated) {
    if (++sweep > max_sweeps)
      throw std::runtime_error("svd_thin: Jacobi sweep limit reached for " + format_dims(a));
    rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += w(i, p) * w(i, p);
          aqq += w(i, q) * w(i, q);
          apq += w(i, p) * w(i, q);
        }
        if (apq * apq <= tol * 1e-4 || apq == 0.0) continue;
        if (apq * apq <= 1e-30 * app * aqq) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int i = 0; i < m; ++i) {
          const double wip = w(i, p);
          const double wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
      }
    }
  }

  std::vector<double> sig(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double nj = 0.0;
    for (int i = 0; i < m; ++i) nj += w(i, j) * w(i, j);
    sig[static_cast<std::size_t>(j)] = std::sqrt(nj);
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return sig[static_cast<std::size_t>(i)] > sig[static_cast<std::size_t>(j)]; });

  ThinSVD out;
  out.U = Mat(m, n);
  out.sigma.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    const double s = sig[static_cast<std::size_t>(src)];
    out.sigma[static_cast<std::size_t>(k)] = s;
    if (s > 0.0)
      for (int i = 0; i < m; ++i) out.U(i, k) = w(i, src) / s;
  }
  return out;
}

Mat column_space(const Mat& a, double tol) {
  ThinSVD svd = svd_thin(a);
  int rank = 0;
  while (rank < a.cols() && svd.sigma[static_cast<std::size_t>(rank)] > tol) ++rank;
  Mat basis(a.rows(), rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < a.rows(); ++i) basis(i, j) = svd.U(i, j);
  return basis;
}

}  // namespace grassmin
