#include "translab/averaging.hpp"

#include <cmath>
#include <fmt/format.h>

namespace translab {

namespace {

void require_inside(const Vec3& x, double reach, const char* who) {
  if (!(norm(x) + reach < 1.0)) {
    throw DomainError(fmt::format("{}: B_{}(x) with |x| = {} leaves B_1", who, reach, norm(x)));
  }
}

}  // namespace

QuadResult ball_average(const SolutionField& u, const Vec3& x, double eps, int order) {
  if (!(eps > 0.0)) throw DomainError("ball_average: eps must be positive");
  require_inside(x, eps, "ball_average");
  const int n = u.dimension();
  const double vol = unit_ball_volume(n) * std::pow(eps, n);
  QuadResult q = integrate_ball(n, [&](const Vec3& y) { return u(y); }, x, eps, u.interface(), order);
  q.value /= vol;
  q.error /= vol;
  return q;
}

double interface_average(const DensityField& g, const InterfaceGraph& gamma, const Vec3& x, double eps,
                         int order) {
  if (!(eps > 0.0)) throw DomainError("interface_average: eps must be positive");
  require_inside(x, eps, "interface_average");
  const ChordSet set = chord_set(gamma, x, eps);
  if (set.empty) return 0.0;
  const int n = gamma.dimension();
  return chord_integral(gamma, set, [&](const Vec3& y) { return g(y); }, order).value /
         (unit_ball_volume(n) * std::pow(eps, n));
}

AveragedField::AveragedField(SolutionField u, double eps, int order) : u_(std::move(u)), eps_(eps), order_(order) {
  if (!(eps_ > 0.0)) throw DomainError("AveragedField: eps must be positive");
}

double AveragedField::interface_value(const Vec3& x) const {
  if (!u_.interface() || !u_.density()) return 0.0;
  return interface_average(*u_.density(), *u_.interface(), x, eps_, 2 * order_);
}

LaplacianMatch laplacian_match(const AveragedField& field, const Vec3& x, double h) {
  if (h <= 0.0) h = field.eps() / 10.0;
  const int n = field.base().dimension();
  if (!(norm(x) + field.eps() + 2.0 * h < 1.0)) {
    throw DomainError(fmt::format("laplacian_match: step {} exceeds the margin left by eps = {} at |x| = {}", h,
                                  field.eps(), norm(x)));
  }
  const double centre = field(x);
  auto stencil = [&](double step) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      if (n == 2 && c == 1) continue;
      Vec3 e{0.0, 0.0, 0.0};
      e[c] = step;
      sum += field(x + e) + field(x - e) - 2.0 * centre;
    }
    return sum / (step * step);
  };
  LaplacianMatch out;
  out.laplacian = stencil(h);
  out.g_eps = field.interface_value(x);
  out.residual = std::abs(out.laplacian - out.g_eps);
  const double coarse = stencil(2.0 * h);
  out.step_budget = std::abs(out.laplacian - coarse) / 3.0;
  out.extrapolated_residual = std::abs((4.0 * out.laplacian - coarse) / 3.0 - out.g_eps);
  return out;
}

}  // namespace translab
