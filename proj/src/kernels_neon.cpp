#ifdef GRASSMIN_HAVE_NEON

#include <arm_neon.h>

#include <cstring>

#include "grassmin/kernels.hpp"

namespace grassmin::kernels::neon {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  for (; i + 2 <= n; i += 2)
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal(double* x, double a, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(av, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void gemm(double* c, const double* a, const double* b, int m, int k, int n) {
  std::memset(c, 0, static_cast<std::size_t>(m) * n * sizeof(double));
  for (int i = 0; i < m; ++i) {
    double* ci = c + static_cast<std::size_t>(i) * n;
    const double* ai = a + static_cast<std::size_t>(i) * k;
    for (int l = 0; l < k; ++l) {
      const float64x2_t av = vdupq_n_f64(ai[l]);
      const double* bl = b + static_cast<std::size_t>(l) * n;
      int j = 0;
      for (; j + 2 <= n; j += 2)
        vst1q_f64(ci + j, vfmaq_f64(vld1q_f64(ci + j), av, vld1q_f64(bl + j)));
      for (; j < n; ++j) ci[j] += ai[l] * bl[j];
    }
  }
}

void plane_rot(double* x, double* y, double c, double s, std::size_t n) {
  const float64x2_t cv = vdupq_n_f64(c);
  const float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xi = vld1q_f64(x + i);
    const float64x2_t yi = vld1q_f64(y + i);
    vst1q_f64(x + i, vfmsq_f64(vmulq_f64(cv, xi), sv, yi));
    vst1q_f64(y + i, vfmaq_f64(vmulq_f64(cv, yi), sv, xi));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace grassmin::kernels::neon

#endif  // GRASSMIN_HAVE_NEON
