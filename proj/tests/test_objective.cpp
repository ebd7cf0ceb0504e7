#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "grassmin/objective.hpp"
#include "grassmin/rng.hpp"
#include "oracle_helpers.hpp"

using namespace grassmin;

namespace {

SymMat random_sym(Rng& rng, int n) {
  Mat x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = rng.normal();
  return SymMat::from(x);
}

}  // namespace

TEST_CASE("instance construction") {
  // A = 0 makes C = B
  const SymMat b = SymMat::diag({1.0, 2.0});
  const ProblemInstance i0 = ProblemInstance::from_AB(SymMat::zero(2), b, 1);
  CHECK(frob_norm(i0.C - i0.B) == 0.0);

  // the (A, C) parametrization reproduces C exactly
  const ProblemInstance fam = oracles::family_2x2(1.0, 1.0, 0.0, 0.1);
  CHECK(fam.C(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(fam.C(1, 1) == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(fam.B(0, 0) == doctest::Approx(0.1 + 0.5).epsilon(1e-15));
  CHECK(fam.B(1, 1) == doctest::Approx(-0.1 + 2.0).epsilon(1e-15));

  // PSD violation reported with the offending eigenvalue
  CHECK_THROWS_WITH_AS(ProblemInstance::from_AB(SymMat::diag({-0.1, 1.0}), b, 1),
                       doctest::Contains("-0.1"), std::invalid_argument);

  CHECK_THROWS_AS(ProblemInstance::from_AB(SymMat::zero(3), b, 1), std::invalid_argument);
  CHECK_THROWS_AS(ProblemInstance::from_AB(SymMat::zero(2), b, 2), std::invalid_argument);

  // C - (B - A^2/2) stays at rounding level
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const ProblemInstance inst = oracles::random_instance(6, 2, 100 + t);
    const SymMat a2 = SymMat::from(inst.A.mat() * inst.A.mat());
    CHECK(frob_norm(inst.C - (inst.B - 0.5 * a2)) <= 1e-12 * (1.0 + frob_norm(inst.B)));
  }
}

TEST_CASE("cost values on the 2x2 family") {
  const ProblemInstance inst = oracles::family_2x2(1.0, 1.0, 0.0, 0.1);
  const SymMat p_plus = SymMat::diag({1.0, 0.0});
  const SymMat p_minus = SymMat::diag({0.0, 1.0});
  CHECK(cost(inst, p_plus) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(cost(inst, p_minus) == doctest::Approx(-0.1).epsilon(1e-14));

  // A = 0 reduces J to Tr(BP)
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const SymMat b = random_sym(rng, 5);
    const ProblemInstance i0 = ProblemInstance::from_AB(SymMat::zero(5), b, 2);
    const GrassmannPoint p = random_grassmann(5, 2, 200 + static_cast<std::uint64_t>(t));
    CHECK(cost(i0, p.P) == doctest::Approx(frob_dot(b.mat(), p.P.mat())).epsilon(1e-12));
  }
}

TEST_CASE("relaxed cost agrees with cost on the manifold") {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    const int M = 3 + static_cast<int>(rng.next_u64() % 6);
    const int m = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(M - 1));
    const ProblemInstance inst = oracles::random_instance(M, m, 300 + static_cast<std::uint64_t>(t), 2.0);
    const GrassmannPoint p = random_grassmann(M, m, 400 + static_cast<std::uint64_t>(t));
    const double j = cost(inst, p.P);
    const double jt = relaxed_cost(inst, p.P);
    CHECK(std::fabs(j - jt) <= 1e-11 * (1.0 + std::fabs(j)));
  }

  // commuting D: relaxed cost is linear
  const ProblemInstance inst = oracles::random_instance(5, 2, 77);
  const ConvexPoint u = ConvexPoint::uniform(5, 2);
  CHECK(relaxed_cost(inst, u.D) ==
        doctest::Approx(2.0 / 5.0 * trace(inst.C)).epsilon(1e-13));
}

TEST_CASE("relaxed minimum matches the projected-gradient oracle on the 3x3 family") {
  const ProblemInstance inst = oracles::family_3x3(1.0, 2.0, 3.0, 0.5, 0.0);
  const SymMat d_oracle = oracles::projected_gradient_oracle(inst, 100000);
  // the known optimum (entries 2/9, 5/18, 1/18, 5/9 pattern)
  const double v = relaxed_cost(inst, d_oracle);
  Mat dstar(3, 3, {2.0 / 9, 5.0 / 18, 1.0 / 18, 5.0 / 18, 5.0 / 9, 5.0 / 18, 1.0 / 18, 5.0 / 18, 2.0 / 9});
  const double v_star = relaxed_cost(inst, SymMat::from(dstar));
  CHECK(v >= v_star - 1e-12);
  CHECK(v - v_star <= 1e-6);
}

TEST_CASE("gradients") {
  // A = 0 and P = 0 both give G = B
  Rng rng(13);
  const SymMat b = random_sym(rng, 4);
  const ProblemInstance i0 = ProblemInstance::from_AB(SymMat::zero(4), b, 1);
  CHECK(frob_norm(cost_grad(i0, SymMat::zero(4)) - b) == 0.0);
  const ProblemInstance inst = oracles::random_instance(4, 2, 500);
  CHECK(frob_norm(cost_grad(inst, SymMat::zero(4)) - inst.B) == 0.0);

  // central differences on the ambient quadratic
  const SymMat p = random_sym(rng, 4);
  const SymMat g = cost_grad(inst, p);
  const double h = 1e-5;
  for (int t = 0; t < 5; ++t) {
    const SymMat x = random_sym(rng, 4);
    const double fd = (cost(inst, p + h * x) - cost(inst, p - h * x)) / (2.0 * h);
    const double lin = frob_dot(g, x);
    CHECK(std::fabs(fd - lin) <= 1e-8 * (1.0 + std::fabs(lin)));
  }

  // relaxed gradient: [A, D] = 0 gives C
  const SymMat d_comm = SymMat::identity(4);
  CHECK(frob_norm(relaxed_grad(inst, d_comm) - inst.C) <= 1e-14);

  const SymMat d = random_sym(rng, 4);
  const SymMat gt = relaxed_grad(inst, d);
  for (int t = 0; t < 5; ++t) {
    const SymMat x = random_sym(rng, 4);
    const double fd = (relaxed_cost(inst, d + h * x) - relaxed_cost(inst, d - h * x)) / (2.0 * h);
    const double lin = frob_dot(gt, x);
    CHECK(std::fabs(fd - lin) <= 1e-8 * (1.0 + std::fabs(lin)));
  }
}

TEST_CASE("relaxed gradient on the 3x3 family at the known minimizer") {
  const ProblemInstance inst = oracles::family_3x3(1.0, 2.0, 3.0, 0.5, 0.0);
  Mat dstar(3, 3, {2.0 / 9, 5.0 / 18, 1.0 / 18, 5.0 / 18, 5.0 / 9, 5.0 / 18, 1.0 / 18, 5.0 / 18, 2.0 / 9});
  const SymMat h = relaxed_grad(inst, SymMat::from(dstar));
  CHECK(h(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(h(0, 1) == doctest::Approx(-1.0 / 9).epsilon(1e-13));
  CHECK(h(0, 2) == doctest::Approx(1.0 / 9).epsilon(1e-13));
  CHECK(h(1, 2) == doctest::Approx(-1.0 / 9).epsilon(1e-13));
}

TEST_CASE("entrywise relaxed-gradient rule in the A eigenbasis") {
  // A diagonal: H_ij = C_ij + (a_i - a_j)^2 D_ij / 2
  Rng rng(14);
  const SymMat a = SymMat::diag({0.3, 1.1, 2.0, 2.7});
  const SymMat c = random_sym(rng, 4);
  const ProblemInstance inst = ProblemInstance::from_AC(a, c, 2);
  const SymMat d = random_sym(rng, 4);
  const SymMat h = relaxed_grad(inst, d);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double diff = a(i, i) - a(j, j);
      CHECK(h(i, j) == doctest::Approx(c(i, j) + 0.5 * diff * diff * d(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("relaxed cost convexity witness") {
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const ProblemInstance inst = oracles::random_instance(5, 2, 600 + static_cast<std::uint64_t>(t));
    const ConvexPoint d1 = random_convex_interior(5, 2, 700 + static_cast<std::uint64_t>(t));
    const ConvexPoint d2 = random_convex_interior(5, 2, 800 + static_cast<std::uint64_t>(t));
    const double lam = rng.uniform();
    const SymMat mix = lam * d1.D + (1.0 - lam) * d2.D;
    CHECK(relaxed_cost(inst, mix) <=
          lam * relaxed_cost(inst, d1.D) + (1.0 - lam) * relaxed_cost(inst, d2.D) + 1e-12);
  }
}

TEST_CASE("residual") {
  // 2x2 family with beta = 0: diag(1,0) is a fixed point
  const ProblemInstance fam = oracles::family_2x2(1.0, 1.0, 0.0, 0.1);
  CHECK(residual(fam, SymMat::diag({1.0, 0.0})) <= 1e-14);

  // random P is generically non-critical
  const ProblemInstance inst = oracles::random_instance(5, 2, 900);
  const GrassmannPoint p = random_grassmann(5, 2, 901);
  CHECK(residual(inst, p.P) > 1e-6);
}

TEST_CASE("ambient finite differences at h = 1e-4") {
  // both costs are quadratic, so central differences match the exact
  // directional derivative to rounding; the order-2 ratio check lives
  // with the retraction curves in the manifold tests
  const ProblemInstance inst = oracles::random_instance(5, 2, 1000, 2.0);
  Rng rng(16);
  const double h = 1e-4;
  for (int t = 0; t < 5; ++t) {
    const SymMat p = random_sym(rng, 5);
    const SymMat x = random_sym(rng, 5);
    const double exact = frob_dot(cost_grad(inst, p), x);
    const double fd = (cost(inst, p + h * x) - cost(inst, p - h * x)) / (2.0 * h);
    CHECK(std::fabs(fd - exact) <= 1e-6 * (1.0 + std::fabs(exact)));

    const double exact_t = frob_dot(relaxed_grad(inst, p), x);
    const double fd_t = (relaxed_cost(inst, p + h * x) - relaxed_cost(inst, p - h * x)) / (2.0 * h);
    CHECK(std::fabs(fd_t - exact_t) <= 1e-6 * (1.0 + std::fabs(exact_t)));
  }
}
