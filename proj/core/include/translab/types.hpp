#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace translab {

// Points are stored as (t1, t2, n): two tangential slots followed by the
// vertical coordinate x_n. In dimension 2 the second tangential slot is
// always zero, so every norm and dot product below is dimension-agnostic.
using Vec3 = std::array<double, 3>;
using Vec2 = std::array<double, 2>;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr Vec3 make_point(double t1, double t2, double xn) { return {t1, t2, xn}; }
inline constexpr Vec3 make_point2(double x1, double x2) { return {x1, 0.0, x2}; }
inline constexpr Vec2 tangential(const Vec3& x) { return {x[0], x[1]}; }
inline constexpr Vec3 lift(const Vec2& xp, double xn) { return {xp[0], xp[1], xn}; }

inline constexpr double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline constexpr double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline constexpr Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline constexpr Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline constexpr Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

/// Volume of the unit ball in R^n (n = 1, 2, 3).
inline double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw std::invalid_argument("unit_ball_volume: unsupported dimension");
  }
}

/// Which piece of B_1 = Omega_1 u Gamma u Omega_2 a point belongs to.
/// Omega_1 lies above the graph (x_n > psi(x')).
enum class Side { Upper, Lower, Interface, Unclassified };

// ---- errors ---------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define TRANSLAB_DEFINE_ERROR(Name, tag) \
  class Name : public Error {            \
   public:                               \
    explicit Name(const std::string& what) : Error(tag, what) {} \
  };

TRANSLAB_DEFINE_ERROR(DomainError, "domain")
TRANSLAB_DEFINE_ERROR(SingularityError, "singularity")
TRANSLAB_DEFINE_ERROR(ConfigError, "config")
TRANSLAB_DEFINE_ERROR(PreconditionError, "precondition")
TRANSLAB_DEFINE_ERROR(EvaluationError, "evaluation")
TRANSLAB_DEFINE_ERROR(GeometryError, "geometry")
TRANSLAB_DEFINE_ERROR(InsufficientDataError, "insufficient-data")

#undef TRANSLAB_DEFINE_ERROR

}  // namespace translab
