#pragma once

#include <memory>
#include <span>
#include <vector>

#include "translab/potential.hpp"

namespace translab {

/// Zero-trace solution of Delta u = g H^{n-1}|Gamma in B_1 after checking the
/// flatness, horizontality and density hypotheses for `params`. Throws
/// PreconditionError naming the first violated bound.
SolutionField solve_curved(std::shared_ptr<const InterfaceGraph> gamma, std::shared_ptr<const DensityField> g,
                           const StabilityParams& params, LayerOptions opts = {});

/// Flat field v with Delta v = density H^{n-1}|{x_n = level} in B_1 and
/// v = u on the sphere (single layer plus the Poisson extension of u's
/// sampled trace). Throws PreconditionError when |level| >= 1/4.
SolutionField flat_companion(const SolutionField& u, double level, double density = 1.0, LayerOptions opts = {});

struct BarrierPair {
  SolutionField lower;  // density M^n (1 + delta) / (1 - eps) on T_{-theta eps}
  SolutionField upper;  // density M^{-n} (1 - delta) on T_{-theta eps}
  double eta;
};

BarrierPair barrier_pair(const SolutionField& u, const StabilityParams& params, LayerOptions opts = {});

/// Lattice points with `size` nodes per axis on [-radius, radius]^n kept
/// inside the closed ball.
std::vector<Vec3> ball_grid(int dim, int size, double radius);

/// sup over the points of |u - v|.
double stability_gap(const SolutionField& u, const SolutionField& v, std::span<const Vec3> grid, int threads = 1);

struct StabilityReport {
  StabilityParams params;
  int dimension = 2;
  double flatness = 0.0;
  double horizontality = 1.0;
  double gap = 0.0;
  double eta = 0.0;
  double barrier_low = 0.0;   // sup over B_{1-M eps} of (lower - u)
  double barrier_high = 0.0;  // sup over B_{1-M eps} of (u - upper)
  double density_low = 0.0;
  double density_high = 0.0;
  double quadrature_error = 0.0;  // largest layer error estimate met on the gap grid
  std::size_t grid_points = 0;
};

struct StabilityRunOptions {
  int grid = 64;
  /// Barrier margins are skipped when false (they triple the cost).
  bool barriers = true;
  int barrier_grid = 32;
  int threads = 1;
};

/// One sweep point: the admissible sinusoid for (theta, eps) with density
/// 1 + delta |y'|^gamma, its flat companion at -theta eps and the barriers.
StabilityReport run_stability_point(int dim, const StabilityParams& params, const StabilityRunOptions& opts = {});

}  // namespace translab
