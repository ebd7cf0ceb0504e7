#pragma once

#include <cstddef>
#include <string_view>

namespace grassmin::kernels {

/// Function table for the dense inner loops. One table per backend
/// (scalar reference, AVX2, NEON); the active table is picked once at
/// startup from CPU capabilities and the GRASSMIN_KERNELS environment
/// variable ("auto", "scalar", "avx2", "neon").
struct Ops {
  const char* name;

  /// sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y[i] += a*x[i]
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  /// x[i] *= a
  void (*scal)(double* x, double a, std::size_t n);
  /// C (m x n) = A (m x k) * B (k x n), row-major, C overwritten
  void (*gemm)(double* c, const double* a, const double* b, int m, int k, int n);
  /// (x, y) <- (c*x - s*y, s*x + c*y), the Jacobi/Givens plane rotation
  void (*plane_rot)(double* x, double* y, double c, double s, std::size_t n);
};

/// Currently selected table.
const Ops& active();

/// Reference table, always available.
const Ops& scalar_ops();

/// Best SIMD table compiled in and supported by this CPU, or nullptr.
const Ops* simd_ops();

/// Select a backend by name. Returns false (and leaves the selection
/// unchanged) if the backend is unknown or unsupported on this CPU.
bool set_backend(std::string_view name);

std::string_view backend_name();

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
void scal(double* x, double a, std::size_t n);
void gemm(double* c, const double* a, const double* b, int m, int k, int n);
void plane_rot(double* x, double* y, double c, double s, std::size_t n);
}  // namespace scalar

#ifdef GRASSMIN_HAVE_AVX2
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
void scal(double* x, double a, std::size_t n);
void gemm(double* c, const double* a, const double* b, int m, int k, int n);
void plane_rot(double* x, double* y, double c, double s, std::size_t n);
}  // namespace avx2
#endif

#ifdef GRASSMIN_HAVE_NEON
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
void scal(double* x, double a, std::size_t n);
void gemm(double* c, const double* a, const double* b, int m, int k, int n);
void plane_rot(double* x, double* y, double c, double s, std::size_t n);
}  // namespace neon
#endif

}  // namespace grassmin::kernels
