#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "translab/quadrature.hpp"
#include "translab/types.hpp"

namespace translab {

enum class InterfaceFamily { Flat, Linear, Sinusoid, Cusp, Custom };

std::string to_string(InterfaceFamily f);

/// Known Hoelder data of the profile gradient, when the family provides it.
struct HolderMetadata {
  bool known = false;
  double alpha0 = 1.0;
  /// sup |grad psi(x') - grad psi(0')| / |x'|^alpha0
  double seminorm_at_origin = 0.0;
  /// global [grad psi]_{C^{0,alpha0}} over the parameter ball
  double seminorm_bound = 0.0;
};

/// An interface given as the graph x_n = psi(x') over the parameter ball
/// |x'| < radius. The profile and its gradient are closed-form callables.
class InterfaceGraph {
 public:
  using Profile = std::function<double(const Vec2&)>;
  using Gradient = std::function<Vec2(const Vec2&)>;

  InterfaceGraph(int dimension, InterfaceFamily family, Profile profile, Gradient gradient,
                 double feature_scale = 1.0, HolderMetadata holder = {}, double radius = 1.0);

  int dimension() const { return dim_; }
  InterfaceFamily family() const { return family_; }
  double radius() const { return radius_; }
  /// Smallest length over which the profile changes appreciably; quadrature
  /// panels are never wider than this.
  double feature_scale() const { return feature_scale_; }
  const HolderMetadata& holder() const { return holder_; }

  double height(const Vec2& xp) const { return profile_(xp); }
  Vec2 slope(const Vec2& xp) const { return gradient_(xp); }
  Vec3 lift_point(const Vec2& xp) const { return lift(xp, profile_(xp)); }
  double area_element(const Vec2& xp) const;
  bool in_parameter_domain(const Vec2& xp) const { return dot(xp, xp) < radius_ * radius_; }

  /// Vertical offset x_n - psi(x'); positive in Omega_1.
  double vertical_offset(const Vec3& x) const;
  Side side(const Vec3& x) const;

  /// Normals point into Omega_1 unless this is set.
  void set_downward_normal(bool flip) { downward_ = flip; }
  bool downward_normal() const { return downward_; }

  /// psi scaled by s (same family, metadata scaled accordingly).
  InterfaceGraph scaled(double s) const;

 private:
  int dim_;
  InterfaceFamily family_;
  Profile profile_;
  Gradient gradient_;
  double feature_scale_;
  HolderMetadata holder_;
  double radius_;
  bool downward_ = false;
};

struct InterfaceSample {
  Vec3 point;
  Vec3 normal;
  double area_element;
};

/// Point, unit normal and area element over x'. Throws DomainError when x' is
/// outside the parameter ball.
InterfaceSample eval_interface(const InterfaceGraph& gamma, const Vec2& xp);

struct FlatnessReport {
  double flatness;       // sup |psi|
  double horizontality;  // inf nu_n
};

/// Grid suprema/infima over the parameter ball. The grid is refined past
/// `resolution` whenever the profile's feature scale demands it.
FlatnessReport flatness_horizontality(const InterfaceGraph& gamma, int resolution = 256);

using SurfaceFunction = std::function<double(const Vec3&)>;

/// Integral of f over the whole graph with the pulled-back area element.
/// Gauss-Legendre on [-R, R] for n = 2; polar (Gauss radial x trapezoid
/// angular) for n = 3. The error is the difference against doubled order.
QuadResult surface_integral(const InterfaceGraph& gamma, const SurfaceFunction& f, int order = 64);

/// Parameter-space set {y' : |(y', psi(y')) - center| < ball_radius} inside the
/// parameter domain. Dimension 2 stores intervals; dimension 3 stores a pole
/// about which the set is treated as star-shaped.
struct ChordSet {
  int dimension = 2;
  std::vector<std::pair<double, double>> intervals;
  Vec2 pole{0.0, 0.0};
  bool empty = true;
  Vec3 center{};
  double ball_radius = 0.0;
};

ChordSet chord_set(const InterfaceGraph& gamma, const Vec3& center, double ball_radius);

/// Radial extent of a 3-D chord set along direction angle phi, measured from
/// the set's pole or from `pole` when given (which must lie inside the set).
double chord_radial_extent(const InterfaceGraph& gamma, const ChordSet& set, double phi,
                           const Vec2* pole = nullptr);

/// Whether y' belongs to the chord set's defining region.
bool chord_contains(const InterfaceGraph& gamma, const ChordSet& set, const Vec2& yp);

/// Surface integral of f restricted to a chord set, with order-doubling error.
QuadResult chord_integral(const InterfaceGraph& gamma, const ChordSet& set,
                          const SurfaceFunction& f, int order = 32);

/// Theta-epsilon flat / epsilon-horizontal hypothesis parameters.
struct StabilityParams {
  double theta = 0.1;
  double eps = 0.1;
  double delta = 0.1;
  double gamma = 0.5;

  double M() const { return 1.0 + 2.0 * theta; }
  /// Throws PreconditionError naming the violated bound.
  void validate() const;
  /// Lower-barrier density M^n (1 + delta) / (1 - eps).
  double lower_barrier_density(int n) const;
  /// Upper-barrier density M^{-n} (1 - delta).
  double upper_barrier_density(int n) const;
  /// Midpoint imbalance: 1 + eta is the mean of the two barrier densities.
  double eta(int n) const;
};

struct InclusionRadii {
  std::optional<double> inner;  // radius of {y' : (y', -theta eps) in B_eps(x)}
  std::optional<double> outer;  // radius of {y' : (y', -theta eps) in B_{M eps}(x)}
};

/// Radii of the flat discs that sandwich the chord sets of Gamma around x.
/// Requires |x| < 1 - M eps; a vacuous radius is returned as nullopt.
InclusionRadii inclusion_radii(const StabilityParams& params, const Vec3& x);

using FamilyParams = std::map<std::string, double>;

/// Test interfaces: flat{level, radius}, linear{slope, slope2}, sinusoid{amp,
/// freq, phase}, cusp{c, alpha0}. Unknown tags throw ConfigError.
InterfaceGraph make_test_interface(int dimension, const std::string& family,
                                   const FamilyParams& params = {});

/// Sinusoid with amplitude theta*eps and slope bound sqrt(2 eps), which is
/// both theta-eps flat and eps-horizontal.
InterfaceGraph admissible_sinusoid(int dimension, double theta, double eps);

}  // namespace translab
