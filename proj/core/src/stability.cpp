#include "translab/stability.hpp"

#include <cmath>
#include <fmt/format.h>

#include "translab/parallel.hpp"

namespace translab {

SolutionField solve_curved(std::shared_ptr<const InterfaceGraph> gamma, std::shared_ptr<const DensityField> g,
                           const StabilityParams& params, LayerOptions opts) {
  params.validate();
  const FlatnessReport fh = flatness_horizontality(*gamma);
  const double te = params.theta * params.eps;
  if (!(fh.flatness <= te * (1.0 + 1e-12))) {
    throw PreconditionError(fmt::format("interface is not theta-eps flat: sup|psi| = {} > {}", fh.flatness, te));
  }
  if (!(fh.horizontality >= 1.0 - params.eps)) {
    throw PreconditionError(
        fmt::format("interface is not eps-horizontal: inf nu_n = {} < {}", fh.horizontality, 1.0 - params.eps));
  }
  const double osc = g->oscillation_from_one(*gamma);
  if (!(osc <= params.delta * (1.0 + 1e-12))) {
    throw PreconditionError(fmt::format("density violates |g - 1| <= delta: sup |g - 1| = {} > {}", osc, params.delta));
  }
  if (g->inf_value(*gamma) < 0.0) throw PreconditionError("density must be nonnegative on Gamma");
  return single_layer_solve(std::move(gamma), std::move(g), opts);
}

SolutionField flat_companion(const SolutionField& u, double level, double density, LayerOptions opts) {
  if (!(std::abs(level) < 0.25)) {
    throw PreconditionError(fmt::format("flat companion level |{}| must be below 1/4", level));
  }
  const int n = u.dimension();
  auto plane = std::make_shared<InterfaceGraph>(make_test_interface(n, "flat", {{"level", level}}));
  auto dens = std::make_shared<DensityField>(DensityField::constant(density));
  SolutionField v(n);
  v.add(std::make_shared<SingleLayer>(plane, dens, Ball{}, opts));
  auto trace = PoissonExtension::from_trace(n, [&u](const Vec3& z) { return u(z); });
  v.add(trace);
  v.set_interface(plane).set_density(dens);
  return v;
}

BarrierPair barrier_pair(const SolutionField& u, const StabilityParams& params, LayerOptions opts) {
  const int n = u.dimension();
  const double level = -params.theta * params.eps;
  return {flat_companion(u, level, params.lower_barrier_density(n), opts),
          flat_companion(u, level, params.upper_barrier_density(n), opts), params.eta(n)};
}

std::vector<Vec3> ball_grid(int dim, int size, double radius) {
  if (size < 2) throw DomainError("ball_grid: need at least two nodes per axis");
  std::vector<Vec3> pts;
  const double h = 2.0 * radius / (size - 1);
  const int m2 = dim == 3 ? size : 1;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < m2; ++j) {
      for (int k = 0; k < size; ++k) {
        const Vec3 p = make_point(-radius + i * h, dim == 3 ? -radius + j * h : 0.0, -radius + k * h);
        if (norm(p) <= radius * (1.0 + 1e-14)) pts.push_back(p);
      }
    }
  }
  return pts;
}

double stability_gap(const SolutionField& u, const SolutionField& v, std::span<const Vec3> grid, int threads) {
  std::vector<double> d(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { d[i] = std::abs(u(grid[i]) - v(grid[i])); });
  double worst = 0.0;
  for (double x : d) worst = std::max(worst, x);
  return worst;
}

StabilityReport run_stability_point(int dim, const StabilityParams& params, const StabilityRunOptions& opts) {
  params.validate();
  auto gamma = std::make_shared<InterfaceGraph>(admissible_sinusoid(dim, params.theta, params.eps));
  auto g = std::make_shared<DensityField>(DensityField::holder(1.0, params.delta, params.gamma));
  StabilityReport rep;
  rep.params = params;
  rep.dimension = dim;
  const FlatnessReport fh = flatness_horizontality(*gamma);
  rep.flatness = fh.flatness;
  rep.horizontality = fh.horizontality;
  const SolutionField u = solve_curved(gamma, g, params);
  const SolutionField v = flat_companion(u, -params.theta * params.eps);

  const auto grid = ball_grid(dim, opts.grid, 0.5);
  rep.grid_points = grid.size();
  std::vector<double> gap(grid.size()), err(grid.size());
  parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
    const EvalResult a = u.value(grid[i]);
    const EvalResult b = v.value(grid[i]);
    gap[i] = std::abs(a.value - b.value);
    err[i] = a.error + b.error;
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.gap = std::max(rep.gap, gap[i]);
    rep.quadrature_error = std::max(rep.quadrature_error, err[i]);
  }
  rep.eta = params.eta(dim);
  rep.density_low = params.lower_barrier_density(dim);
  rep.density_high = params.upper_barrier_density(dim);
  if (opts.barriers) {
    const BarrierPair bp = barrier_pair(u, params);
    const auto inner = ball_grid(dim, opts.barrier_grid, 1.0 - params.M() * params.eps);
    std::vector<double> lo(inner.size()), hi(inner.size());
    parallel_for(inner.size(), opts.threads, [&](std::size_t i) {
      const double uu = u(inner[i]);
      lo[i] = bp.lower(inner[i]) - uu;
      hi[i] = uu - bp.upper(inner[i]);
    });
    rep.barrier_low = -INFINITY;
    rep.barrier_high = -INFINITY;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      rep.barrier_low = std::max(rep.barrier_low, lo[i]);
      rep.barrier_high = std::max(rep.barrier_high, hi[i]);
    }
  }
  return rep;
}

}  // namespace translab
