#pragma once

#include "translab/potential.hpp"

namespace translab {

/// Mean of u over B_eps(x), split along u's interface. Throws DomainError
/// unless B_eps(x) lies inside B_1.
QuadResult ball_average(const SolutionField& u, const Vec3& x, double eps, int order = 32);

/// (1/|B_eps|) * integral of g over Gamma cap B_eps(x); zero when the
/// intersection is empty.
double interface_average(const DensityField& g, const InterfaceGraph& gamma, const Vec3& x, double eps,
                         int order = 32);

/// The pair (u_eps, g_eps) for a solution carrying its interface and density.
class AveragedField {
 public:
  AveragedField(SolutionField u, double eps, int order = 32);

  double eps() const { return eps_; }
  const SolutionField& base() const { return u_; }
  double value(const Vec3& x) const { return ball_average(u_, x, eps_, order_).value; }
  double operator()(const Vec3& x) const { return value(x); }
  double interface_value(const Vec3& x) const;

 private:
  SolutionField u_;
  double eps_;
  int order_;
};

struct LaplacianMatch {
  double residual = 0.0;   // |Delta_h u_eps(x) - g_eps(x)|
  double laplacian = 0.0;  // Delta_h u_eps(x)
  double g_eps = 0.0;
  /// Richardson estimate of the O(h^2) stencil error from the 2h stencil.
  double step_budget = 0.0;
  /// |(4 Delta_h - Delta_2h) / 3 - g_eps|: the same stencils with the h^2 term removed.
  double extrapolated_residual = 0.0;
};

/// Compares the 5-point (n = 2) or 7-point (n = 3) Laplacian of u_eps at x
/// with g_eps(x). h <= 0 selects eps / 10. The 2h stencil supplies the error
/// budget and an extrapolated residual.
LaplacianMatch laplacian_match(const AveragedField& field, const Vec3& x, double h = 0.0);

}  // namespace translab
