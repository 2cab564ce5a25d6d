#include "translab/flat.hpp"

#include <cmath>
#include <fmt/format.h>

#include "translab/parallel.hpp"

namespace translab {

void FlatSlab::validate() const {
  if (dim != 2 && dim != 3) throw DomainError(fmt::format("flat slab: unsupported dimension {}", dim));
  if (!(r > 0.0)) throw GeometryError(fmt::format("flat slab: radius {} must be positive", r));
  if (!(std::abs(a) < r)) throw GeometryError(fmt::format("flat slab: |a| = {} must be below r = {}", std::abs(a), r));
}

InterfaceGraph FlatSlab::interface() const {
  return make_test_interface(dim, "flat", {{"level", a}, {"radius", r}});
}

SolutionField flat_solve(const FlatSlab& slab, const DensityField& g, const BoundaryData& f, LayerOptions opts) {
  slab.validate();
  auto gamma = std::make_shared<InterfaceGraph>(slab.interface());
  auto dens = std::make_shared<DensityField>(g);
  if (!std::isfinite(dens->sup_norm(*gamma))) throw EvaluationError("flat_solve: density is not bounded on T");
  SolutionField v(slab.dim);
  v.add(std::make_shared<SingleLayer>(gamma, dens, slab.ball(), opts));
  if (f) v.add(std::make_shared<PoissonExtension>(slab.dim, f, slab.ball()));
  v.set_interface(gamma).set_density(dens);
  return v;
}

OneSidedDerivative one_sided_derivative(const SolutionField& v, const Vec3& x, int side, LadderOptions ladder) {
  if (side != 1 && side != -1) throw DomainError("one_sided_derivative: side must be +1 or -1");
  if (ladder.rungs < 2 || !(ladder.t0 > 0.0)) throw DomainError("one_sided_derivative: ladder needs two rungs");
  Vec3 nu{0.0, 0.0, 1.0};
  if (const InterfaceGraph* gam = v.interface()) nu = eval_interface(*gam, tangential(x)).normal;
  const int m = ladder.rungs;
  std::vector<Vec3> d(m);
  double t = ladder.t0;
  for (int k = 0; k < m; ++k, t *= 0.5) d[k] = v.gradient(x + (side * t) * nu).gradient;
  // First-order Richardson column; its leading error is t^beta with beta unknown
  // when g is only Hoelder, so the column is finished by Aitken's delta-squared.
  std::vector<Vec3> c1(m - 1);
  for (int k = 0; k + 1 < m; ++k) c1[k] = 2.0 * d[k + 1] - d[k];
  OneSidedDerivative out;
  const Vec3& last = c1.back();
  out.value = last;
  if (c1.size() < 2) {
    out.error = norm(d[1] - d[0]);
    return out;
  }
  const Vec3& prev = c1[c1.size() - 2];
  out.error = norm(last - prev);
  if (c1.size() < 3) return out;
  const Vec3& first = c1[c1.size() - 3];
  for (int i = 0; i < 3; ++i) {
    const double d1 = prev[i] - first[i];
    const double d2 = last[i] - prev[i];
    if (std::abs(d1) <= 1e-13 * (1.0 + std::abs(last[i]))) continue;
    const double q = d2 / d1;
    if (q > 0.0 && q < 1.0) {
      out.value[i] = last[i] + d2 * q / (1.0 - q);
    } else if (std::abs(d2) > std::abs(d1)) {
      out.converged = false;
    }
  }
  out.error = std::max(norm(out.value - last), 1e-15 * (1.0 + norm(last)));
  return out;
}

std::vector<Vec3> symmetric_grid(const FlatSlab& slab, int size) {
  std::vector<Vec3> pts;
  const double h = 2.0 * slab.r / size;
  for (int i = 0; i <= size; ++i) {
    const double t1 = -slab.r + i * h;
    for (int j = 1; j <= size / 2; ++j) {
      const double s = j * h;
      if (slab.dim == 2) {
        const Vec3 p = make_point(t1, 0.0, slab.a + s);
        if (norm(p - slab.ball().center) < slab.r) pts.push_back(p);
      } else {
        for (int l = 0; l <= size; l += 4) {
          const Vec3 p = make_point(t1, -slab.r + l * h, slab.a + s);
          if (norm(p - slab.ball().center) < slab.r) pts.push_back(p);
        }
      }
    }
  }
  return pts;
}

double reflection_check(const SolutionField& v, std::span<const Vec3> upper_points, double a, int threads) {
  std::vector<double> diff(upper_points.size());
  parallel_for(upper_points.size(), threads, [&](std::size_t i) {
    const Vec3& p = upper_points[i];
    Vec3 q = p;
    q[2] = 2.0 * a - p[2];
    diff[i] = std::abs(v(p) - v(q));
  });
  double worst = 0.0;
  for (double d : diff) worst = std::max(worst, d);
  return worst;
}

}  // namespace translab
