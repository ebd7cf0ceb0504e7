#include <cstdlib>
#include <string_view>

#include "grassmin/kernels.hpp"

namespace grassmin::kernels {

namespace {

const Ops kScalar = {
    "scalar", scalar::dot, scalar::axpy, scalar::scal, scalar::gemm, scalar::plane_rot,
};

#ifdef GRASSMIN_HAVE_AVX2
const Ops kAvx2 = {
    "avx2", avx2::dot, avx2::axpy, avx2::scal, avx2::gemm, avx2::plane_rot,
};

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

#ifdef GRASSMIN_HAVE_NEON
const Ops kNeon = {
    "neon", neon::dot, neon::axpy, neon::scal, neon::gemm, neon::plane_rot,
};
#endif

const Ops* best_simd() {
#ifdef GRASSMIN_HAVE_AVX2
  if (avx2_supported()) return &kAvx2;
#endif
#ifdef GRASSMIN_HAVE_NEON
  return &kNeon;  // NEON is baseline on aarch64
#endif
  return nullptr;
}

const Ops* lookup(std::string_view name) {
  if (name == "scalar") return &kScalar;
  if (name == "auto") {
    const Ops* simd = best_simd();
    return simd ? simd : &kScalar;
  }
#ifdef GRASSMIN_HAVE_AVX2
  if (name == "avx2" && avx2_supported()) return &kAvx2;
#endif
#ifdef GRASSMIN_HAVE_NEON
  if (name == "neon") return &kNeon;
#endif
  return nullptr;
}

const Ops* initial_backend() {
  if (const char* env = std::getenv("GRASSMIN_KERNELS")) {
    if (const Ops* ops = lookup(env)) return ops;
  }
  const Ops* simd = best_simd();
  return simd ? simd : &kScalar;
}

const Ops*& current() {
  static const Ops* ops = initial_backend();
  return ops;
}

}  // namespace

const Ops& active() { return *current(); }

const Ops& scalar_ops() { return kScalar; }

const Ops* simd_ops() { return best_simd(); }

bool set_backend(std::string_view name) {
  const Ops* ops = lookup(name);
  if (!ops) return false;
  current() = ops;
  return true;
}

std::string_view backend_name() { return current()->name; }

}  // namespace grassmin::kernels
