#include "translab/density.hpp"

#include <algorithm>
#include <cmath>

namespace translab {

DensityField DensityField::constant(double c) {
  return DensityField("constant", [c](const Vec3&) { return c; });
}

DensityField DensityField::holder(double base, double amp, double beta) {
  return DensityField("holder", [=](const Vec3& y) {
    return base + amp * std::pow(std::hypot(y[0], y[1]), beta);
  });
}

DensityField DensityField::scaled(double s) const {
  auto fn = fn_;
  return DensityField(family_, [fn, s](const Vec3& y) { return s * fn(y); });
}

namespace {

template <class Visit>
void sample_gamma(const InterfaceGraph& gamma, int resolution, Visit&& visit) {
  const double R = gamma.radius() * (1.0 - 1e-12);
  if (gamma.dimension() == 2) {
    for (int i = 0; i <= resolution; ++i) {
      const Vec2 xp{-R + 2.0 * R * i / resolution, 0.0};
      visit(gamma.lift_point(xp));
    }
    return;
  }
  const int m = std::min(resolution, 256);
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const Vec2 xp{-R + 2.0 * R * i / m, -R + 2.0 * R * j / m};
      if (dot(xp, xp) < R * R) visit(gamma.lift_point(xp));
    }
  }
}

}  // namespace

double DensityField::sup_norm(const InterfaceGraph& gamma, int resolution) const {
  double s = 0.0;
  sample_gamma(gamma, resolution, [&](const Vec3& y) { s = std::max(s, std::abs(fn_(y))); });
  return s;
}

double DensityField::inf_value(const InterfaceGraph& gamma, int resolution) const {
  double s = INFINITY;
  sample_gamma(gamma, resolution, [&](const Vec3& y) { s = std::min(s, fn_(y)); });
  return s;
}

double DensityField::holder_at_origin(const InterfaceGraph& gamma, double alpha, int resolution) const {
  const Vec3 origin = gamma.lift_point({0.0, 0.0});
  const double g0 = fn_(origin);
  double s = 0.0;
  sample_gamma(gamma, resolution, [&](const Vec3& y) {
    const double r = norm(y - origin);
    if (r > 0.0) s = std::max(s, std::abs(fn_(y) - g0) / std::pow(r, alpha));
  });
  return s;
}

double DensityField::oscillation_from_one(const InterfaceGraph& gamma, int resolution) const {
  double s = 0.0;
  sample_gamma(gamma, resolution, [&](const Vec3& y) { s = std::max(s, std::abs(fn_(y) - 1.0)); });
  return s;
}

}  // namespace translab
