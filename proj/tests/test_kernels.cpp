#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "grassmin/kernels.hpp"
#include "grassmin/rng.hpp"

using namespace grassmin;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
  return v;
}

const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 97, 256};

}  // namespace

TEST_CASE("scalar and SIMD kernels agree") {
  const kernels::Ops* simd = kernels::simd_ops();
  if (!simd) {
    MESSAGE("no SIMD backend compiled/supported on this host, equivalence skipped");
    return;
  }
  const kernels::Ops& ref = kernels::scalar_ops();
  Rng rng(42);

  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    {
      const double a = ref.dot(x.data(), y.data(), n);
      const double b = simd->dot(x.data(), y.data(), n);
      CHECK(std::fabs(a - b) <= 1e-13 * (1.0 + std::fabs(a) + static_cast<double>(n)));
    }
    {
      auto y1 = y, y2 = y;
      ref.axpy(y1.data(), 0.37, x.data(), n);
      simd->axpy(y2.data(), 0.37, x.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-14);
    }
    {
      auto x1 = x, x2 = x;
      ref.scal(x1.data(), -1.7, n);
      simd->scal(x2.data(), -1.7, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);
    }
    {
      auto x1 = x, y1 = y, x2 = x, y2 = y;
      const double c = std::cos(0.3), s = std::sin(0.3);
      ref.plane_rot(x1.data(), y1.data(), c, s, n);
      simd->plane_rot(x2.data(), y2.data(), c, s, n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(x1[i] - x2[i]) <= 1e-15);
        CHECK(std::fabs(y1[i] - y2[i]) <= 1e-15);
      }
    }
  }
}

TEST_CASE("gemm equivalence across shapes") {
  const kernels::Ops* simd = kernels::simd_ops();
  if (!simd) return;
  const kernels::Ops& ref = kernels::scalar_ops();
  Rng rng(7);

  const int shapes[][3] = {{1, 1, 1}, {2, 3, 4}, {5, 5, 5}, {7, 3, 9},
                           {8, 8, 8}, {13, 17, 11}, {30, 30, 30}, {33, 31, 29}};
  for (const auto& sh : shapes) {
    const int m = sh[0], k = sh[1], n = sh[2];
    CAPTURE(m);
    CAPTURE(k);
    CAPTURE(n);
    const auto a = random_vec(rng, static_cast<std::size_t>(m) * k);
    const auto b = random_vec(rng, static_cast<std::size_t>(k) * n);
    std::vector<double> c1(static_cast<std::size_t>(m) * n), c2(c1);
    ref.gemm(c1.data(), a.data(), b.data(), m, k, n);
    simd->gemm(c2.data(), a.data(), b.data(), m, k, n);
    for (std::size_t i = 0; i < c1.size(); ++i)
      CHECK(std::fabs(c1[i] - c2[i]) <= 1e-13 * (1.0 + std::fabs(c1[i])) * k);
  }
}

TEST_CASE("backend selection") {
  const auto original = std::string(kernels::backend_name());
  CHECK(kernels::set_backend("scalar"));
  CHECK(kernels::backend_name() == "scalar");
  CHECK_FALSE(kernels::set_backend("nonsense"));
  CHECK(kernels::backend_name() == "scalar");
  CHECK(kernels::set_backend("auto"));
  if (kernels::simd_ops()) CHECK(kernels::backend_name() == kernels::simd_ops()->name);
  kernels::set_backend(original);
}
