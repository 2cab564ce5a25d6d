#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "translab/density.hpp"
#include "translab/geometry.hpp"
#include "translab/quadrature.hpp"
#include "translab/types.hpp"

namespace translab {

// ---- Green's function of a ball -------------------------------------------

/// A ball B_radius(center); the kernels below vanish on its boundary.
struct Ball {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;
};

/// Green's function of the unit ball with Delta_x G = delta_y (so G <= 0):
///   n = 2: (1/4 pi) [ln |x-y|^2 - ln q],  n = 3: -(1/4 pi) [1/|x-y| - 1/sqrt(q)]
/// with q = |x|^2 |y|^2 - 2 x.y + 1 = (|y| |x - y/|y|^2|)^2, which stays
/// finite (q -> 1) as y -> 0.
/// Throws SingularityError for x = y and DomainError for |y| >= 1 or |x| > 1.
double green_ball(const Vec3& x, const Vec3& y, int n);

/// Analytic gradient of green_ball in x.
Vec3 green_gradient(const Vec3& x, const Vec3& y, int n);

/// Kernel of an arbitrary ball: radius^(2-n) G((x-c)/radius, (y-c)/radius).
double green_in_ball(const Ball& ball, const Vec3& x, const Vec3& y, int n);
Vec3 green_gradient_in_ball(const Ball& ball, const Vec3& x, const Vec3& y, int n);

namespace detail {
// Unchecked kernels for the inner quadrature loops.
double green_unit(const Vec3& x, const Vec3& y, int n);
Vec3 green_unit_gradient(const Vec3& x, const Vec3& y, int n);
}  // namespace detail

// ---- field terms ---------------------------------------------------------------

struct EvalResult {
  double value = 0.0;
  double error = 0.0;
  bool near_interface = false;
  bool on_interface = false;
};

struct GradResult {
  Vec3 gradient{0.0, 0.0, 0.0};
  double error = 0.0;
};

/// One additive piece of a solution (a layer potential, a harmonic correction,
/// a closed-form field). Terms are immutable once built.
class FieldTerm {
 public:
  virtual ~FieldTerm() = default;
  virtual EvalResult value(const Vec3& x) const = 0;
  virtual GradResult gradient(const Vec3& x) const = 0;
};

struct LayerOptions {
  int panel_order = 8;
  double panel_tol = 1e-13;
  /// Distances to Gamma below this many panel widths are flagged as near.
  double near_factor = 3.0;
  /// Panels never exceed this width in the parameter variable.
  double max_panel_width = 0.125;
};

/// x -> int_{Gamma cap ball} G_ball(x, y) g(y) dH^{n-1}(y), evaluated by
/// adaptive panel bisection with a breakpoint at the projection of x.
class SingleLayer final : public FieldTerm {
 public:
  SingleLayer(std::shared_ptr<const InterfaceGraph> gamma, std::shared_ptr<const DensityField> g,
              Ball ball = {}, LayerOptions opts = {});

  EvalResult value(const Vec3& x) const override;
  GradResult gradient(const Vec3& x) const override;

  const InterfaceGraph& interface() const { return *gamma_; }
  const Ball& ball() const { return ball_; }

 private:
  template <class Kernel>
  QuadResult integrate(const Vec3& x, Kernel&& kernel) const;
  double panel_width() const;

  std::shared_ptr<const InterfaceGraph> gamma_;
  std::shared_ptr<const DensityField> g_;
  Ball ball_;
  LayerOptions opts_;
  ChordSet support_;
  int dim_;
};

using BoundaryData = std::function<double(const Vec3&)>;

/// Harmonic extension of boundary data into a ball by the Poisson integral.
/// Closed-form data is integrated adaptively at every evaluation; a sampled
/// trace (e.g. another field restricted to the sphere) is cached once.
class PoissonExtension final : public FieldTerm {
 public:
  PoissonExtension(int dim, BoundaryData f, Ball ball = {}, int order = 16);

  /// Samples f once: n = 2 keeps the Fourier series of `samples` equispaced
  /// values; n = 3 keeps a Gauss x trapezoid grid of the sphere.
  static std::shared_ptr<PoissonExtension> from_trace(int dim, const BoundaryData& f, Ball ball = {},
                                                      int samples = 512);

  EvalResult value(const Vec3& x) const override;
  GradResult gradient(const Vec3& x) const override;
  /// Largest |f| over the cached samples (0 for closed-form data not sampled).
  double trace_sup() const { return trace_sup_; }

 private:
  PoissonExtension() = default;
  Vec3 to_unit(const Vec3& x) const;

  int dim_ = 2;
  BoundaryData f_;
  Ball ball_;
  int order_ = 16;
  bool sampled_ = false;
  // n = 2 Fourier data: h = Re sum_k c_k z^k.
  std::vector<double> re_, im_;
  // n = 3 cached nodes on the unit sphere.
  std::vector<Vec3> nodes_;
  std::vector<double> weights_, values_;
  double trace_sup_ = 0.0;
};

/// Closed-form field with a closed-form gradient (test fields, polynomials).
class AnalyticTerm final : public FieldTerm {
 public:
  using ValueFn = std::function<double(const Vec3&)>;
  using GradFn = std::function<Vec3(const Vec3&)>;
  AnalyticTerm(ValueFn v, GradFn g) : v_(std::move(v)), g_(std::move(g)) {}
  EvalResult value(const Vec3& x) const override { return {v_(x), 0.0, false, false}; }
  GradResult gradient(const Vec3& x) const override { return {g_(x), 0.0}; }

 private:
  ValueFn v_;
  GradFn g_;
};

// ---- solution fields -----------------------------------------------------------

/// An evaluator for u = sum_i c_i * term_i, carrying the interface used for
/// side classification and the density it was built from.
class SolutionField {
 public:
  explicit SolutionField(int dim) : dim_(dim) {}

  int dimension() const { return dim_; }
  SolutionField& add(std::shared_ptr<const FieldTerm> term, double coef = 1.0);
  SolutionField& set_interface(std::shared_ptr<const InterfaceGraph> gamma);
  SolutionField& set_density(std::shared_ptr<const DensityField> g);

  EvalResult value(const Vec3& x) const;
  double operator()(const Vec3& x) const { return value(x).value; }
  GradResult gradient(const Vec3& x) const;
  Side side(const Vec3& x) const;

  const InterfaceGraph* interface() const { return gamma_.get(); }
  std::shared_ptr<const InterfaceGraph> interface_ptr() const { return gamma_; }
  const DensityField* density() const { return g_.get(); }
  std::shared_ptr<const DensityField> density_ptr() const { return g_; }
  std::size_t term_count() const { return terms_.size(); }

  SolutionField scaled(double s) const;
  /// a*u + b*v; interface and density are taken from u.
  static SolutionField combine(double a, const SolutionField& u, double b, const SolutionField& v);

  /// Values at many points, computed in parallel; output order follows input.
  std::vector<double> evaluate(std::span<const Vec3> points, int threads = 1) const;

 private:
  int dim_;
  std::vector<std::pair<double, std::shared_ptr<const FieldTerm>>> terms_;
  std::shared_ptr<const InterfaceGraph> gamma_;
  std::shared_ptr<const DensityField> g_;
};

/// u(x) = int_Gamma G(x, y) g(y) dH^{n-1}: zero trace on the unit sphere.
SolutionField single_layer_solve(const InterfaceGraph& gamma, const DensityField& g, LayerOptions opts = {});
SolutionField single_layer_solve(std::shared_ptr<const InterfaceGraph> gamma,
                                 std::shared_ptr<const DensityField> g, LayerOptions opts = {});

/// Harmonic function in B_1 attaining f on the sphere.
SolutionField poisson_extend(const BoundaryData& f, int n, int order = 16);

// ---- distributional verification ----------------------------------------------

/// phi(x) = (1 - |x - c|^2 / r^2)^4 inside B_r(c), zero outside.
struct TestFunction {
  Vec3 center{};
  double radius = 0.25;
  int dimension = 2;

  double value(const Vec3& x) const;
  double laplacian(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
};

/// Integral of F over B_radius(center), split along Gamma when given so that
/// kinks across the interface do not degrade the rule. Cartesian columns
/// under the substitution x_1 = c_1 + r sin(theta) (n = 2) or polar columns
/// (n = 3). Error estimate from order doubling.
QuadResult integrate_ball(int dim, const std::function<double(const Vec3&)>& F, const Vec3& center,
                          double radius, const InterfaceGraph* gamma, int order);

struct DistributionalCheck {
  double residual = 0.0;
  double volume_term = 0.0;   // int u Lap(phi)
  double surface_term = 0.0;  // int_Gamma g phi
  double volume_error = 0.0;
  double surface_error = 0.0;
};

DistributionalCheck verify_distributional(const SolutionField& u, const InterfaceGraph& gamma,
                                          const DensityField& g, const TestFunction& phi,
                                          int volume_order = 32, int surface_order = 64);

}  // namespace translab
