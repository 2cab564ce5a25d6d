#pragma once

#include <span>
#include <vector>

#include "translab/potential.hpp"

namespace translab {

/// The ball B_r(0', a) cut by the flat interface T_{r,a} = {x_n = a}.
struct FlatSlab {
  double r = 1.0;
  double a = 0.0;
  int dim = 2;

  /// Throws GeometryError unless |a| < r.
  void validate() const;
  Ball ball() const { return {make_point(0.0, 0.0, a), r}; }
  /// T_{r,a} as a graph over |x'| < r.
  InterfaceGraph interface() const;

  bool in_ball(const Vec3& x) const { return norm(x - ball().center) < r; }
  bool on_interface(const Vec3& x) const { return in_ball(x) && x[2] == a; }
  bool upper(const Vec3& x) const { return in_ball(x) && x[2] > a; }
  bool lower(const Vec3& x) const { return in_ball(x) && x[2] < a; }
};

/// Solution of Delta v = g H^{n-1}|T in B_r(0', a) with v = f on the sphere:
/// the single layer of T with the ball's own Green kernel plus the Poisson
/// extension of f. An empty f means zero boundary data.
SolutionField flat_solve(const FlatSlab& slab, const DensityField& g, const BoundaryData& f = {},
                         LayerOptions opts = {});

struct LadderOptions {
  /// First offset from the interface; the others are t0/2, t0/4, ...
  double t0 = 0.05;
  int rungs = 4;
};

struct OneSidedDerivative {
  Vec3 value{0.0, 0.0, 0.0};
  double error = 0.0;
  /// False when successive extrapolation corrections grow.
  bool converged = true;
};

/// Limit of grad v(x + side * t * nu) as t -> 0+, with nu the upward normal
/// of v's interface at x (e_n when v carries none). One Richardson step
/// removes the O(t) term; Aitken's delta-squared on the last three
/// extrapolants removes a leading t^beta of unknown beta. The error is the
/// size of that last correction.
OneSidedDerivative one_sided_derivative(const SolutionField& v, const Vec3& x, int side,
                                        LadderOptions ladder = {});

/// Points (x', a + s) with s > 0 on a grid of the upper half of the slab;
/// reflection_check pairs each with (x', a - s).
std::vector<Vec3> symmetric_grid(const FlatSlab& slab, int size);

/// max |v(x', a + s) - v(x', a - s)| over the given upper points.
double reflection_check(const SolutionField& v, std::span<const Vec3> upper_points, double a = 0.0,
                        int threads = 1);

}  // namespace translab
