#include <gtest/gtest.h>

#include <cmath>

#include "translab/flat.hpp"

using namespace translab;

namespace {

double jump_at(const SolutionField& v, const Vec3& x, double* err = nullptr) {
  const auto up = one_sided_derivative(v, x, +1);
  const auto lo = one_sided_derivative(v, x, -1);
  if (err) *err = up.error + lo.error;
  return up.value[2] - lo.value[2];
}

}  // namespace

TEST(FlatSlab, Validate) {
  EXPECT_NO_THROW((FlatSlab{1.0, 0.5, 2}.validate()));
  EXPECT_THROW((FlatSlab{1.0, 1.0, 2}.validate()), GeometryError);
  EXPECT_THROW((FlatSlab{0.5, -0.7, 2}.validate()), GeometryError);
}

TEST(FlatSolve, ZeroDataGivesZero) {
  const auto v = flat_solve(FlatSlab{}, DensityField::zero());
  EXPECT_EQ(v(make_point2(0.2, 0.3)), 0.0);
}

TEST(FlatSolve, UnitDensityJumpAndTangentialContinuity) {
  const auto v = flat_solve(FlatSlab{}, DensityField::constant(1.0));
  for (double x1 : {0.0, 0.3, -0.5}) {
    const Vec3 x = make_point2(x1, 0.0);
    const auto up = one_sided_derivative(v, x, +1);
    const auto lo = one_sided_derivative(v, x, -1);
    EXPECT_NEAR(up.value[2] - lo.value[2], 1.0, 1e-3);
    EXPECT_NEAR(up.value[0], lo.value[0], 1e-3);
    EXPECT_TRUE(up.converged && lo.converged);
  }
  EXPECT_NEAR(one_sided_derivative(v, make_point2(0, 0), +1).value[2], 0.5, 1e-2);
}

TEST(FlatSolve, HolderDensityJump) {
  const auto g = DensityField::holder(1.0, 0.1, 0.6);
  const auto v = flat_solve(FlatSlab{}, g);
  for (double x1 : {0.0, 0.3, -0.5}) {
    const Vec3 x = make_point2(x1, 0.0);
    double err = 0.0;
    const double j = jump_at(v, x, &err);
    EXPECT_NEAR(j, g(x), std::max(1e-3, 10 * err)) << "x1 = " << x1;
    EXPECT_NEAR(j, g(x), 1e-3) << "x1 = " << x1;
  }
}

TEST(FlatSolve, HarmonicFieldHasNoJump) {
  const auto v = flat_solve(FlatSlab{}, DensityField::zero(), [](const Vec3& y) { return y[0] * y[2] + y[2]; });
  const Vec3 x = make_point2(0.2, 0.0);
  const auto up = one_sided_derivative(v, x, +1);
  const auto lo = one_sided_derivative(v, x, -1);
  EXPECT_NEAR(up.value[2], lo.value[2], std::max(1e-8, up.error + lo.error));
  EXPECT_NEAR(up.value[2], 1.2, 1e-8);
}

TEST(Reflection, UnitDensityIsSymmetric) {
  const FlatSlab slab{};
  const auto v = flat_solve(slab, DensityField::constant(1.0));
  const auto grid = symmetric_grid(slab, 32);
  EXPECT_LT(reflection_check(v, grid), 1e-8);
}

TEST(Reflection, PoissonControls) {
  const FlatSlab slab{};
  const auto grid = symmetric_grid(slab, 32);
  EXPECT_LT(reflection_check(poisson_extend([](const Vec3& y) { return y[0]; }, 2), grid), 1e-14);
  double top = 0.0;
  for (const auto& p : grid) top = std::max(top, p[2]);
  const auto odd = poisson_extend([](const Vec3& y) { return y[2]; }, 2);
  EXPECT_NEAR(reflection_check(odd, grid), 2 * top, 1e-12);
}

// v on (r, a) equals v~ on the unit slab with g~(x) = r g(r x', r x_n + a).
TEST(FlatSolve, RescalingLaw) {
  const double r = 0.5, a = 0.2;
  const auto g = DensityField::holder(1.0, 0.1, 0.6);
  const BoundaryData f = [](const Vec3& y) { return y[0] + 0.3 * y[2] * y[2]; };
  const auto v = flat_solve(FlatSlab{r, a, 2}, g, f);
  const DensityField gt("rescaled", [&](const Vec3& y) { return r * g(make_point(r * y[0], r * y[1], r * y[2] + a)); });
  const BoundaryData ft = [&](const Vec3& y) { return f(make_point(r * y[0], r * y[1], r * y[2] + a)); };
  const auto vt = flat_solve(FlatSlab{1.0, 0.0, 2}, gt, ft);
  for (const Vec3& x : {make_point2(0.1, 0.3), make_point2(-0.2, 0.05), make_point2(0.3, 0.0), make_point2(0.0, -0.2)}) {
    const auto lhs = v.value(x);
    const auto rhs = vt.value(make_point2(x[0] / r, (x[2] - a) / r));
    EXPECT_NEAR(lhs.value, rhs.value, 1e-10 + lhs.error + rhs.error);
  }
}

TEST(FlatSolve, TwoQuadratureOrdersAgree) {
  const auto g = DensityField::holder(1.0, 0.1, 0.6);
  LayerOptions hi;
  hi.panel_order = 16;
  const auto v1 = flat_solve(FlatSlab{}, g);
  const auto v2 = flat_solve(FlatSlab{}, g, {}, hi);
  for (const Vec3& x : {make_point2(0.1, 0.3), make_point2(-0.4, -0.01)}) {
    const auto a = v1.value(x), b = v2.value(x);
    EXPECT_NEAR(a.value, b.value, std::max(1e-12, std::max(a.error, b.error)));
  }
}

TEST(FlatSolve, SecondDifferencesStayBoundedUpToInterface) {
  const auto v = flat_solve(FlatSlab{}, DensityField::constant(1.0));
  double lo = INFINITY, hi = 0.0;
  for (double t = 0.05; t > 1e-3; t *= 0.5) {
    const Vec3 x = make_point2(0.2, t);
    const double s = 0.5 * t;
    const double d2 = std::abs(v(x + Vec3{s, 0, 0}) - 2 * v(x) + v(x - Vec3{s, 0, 0})) / (s * s);
    lo = std::min(lo, d2);
    hi = std::max(hi, d2);
  }
  EXPECT_LT(hi, 10.0);
}

TEST(Ladder, RejectsBadInput) {
  const auto v = flat_solve(FlatSlab{}, DensityField::constant(1.0));
  EXPECT_THROW(one_sided_derivative(v, make_point2(0, 0), 0), DomainError);
  EXPECT_THROW(one_sided_derivative(v, make_point2(0, 0), 1, {0.05, 1}), DomainError);
}

TEST(FlatSolve, ThreeDimensionalJump) {
  const auto v = flat_solve(FlatSlab{1.0, 0.0, 3}, DensityField::constant(1.0));
  EXPECT_NEAR(jump_at(v, make_point(0.1, 0.2, 0.0)), 1.0, 1e-3);
}
