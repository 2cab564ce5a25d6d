#pragma once

#include <functional>
#include <string>

#include "translab/geometry.hpp"
#include "translab/types.hpp"

namespace translab {

/// The transmission datum g on Gamma, evaluated at points of R^n.
class DensityField {
 public:
  using Fn = std::function<double(const Vec3&)>;

  DensityField(std::string family, Fn fn) : family_(std::move(family)), fn_(std::move(fn)) {}

  static DensityField constant(double c);
  /// base + amp * |y'|^beta
  static DensityField holder(double base, double amp, double beta);
  static DensityField zero() { return constant(0.0); }

  double operator()(const Vec3& y) const { return fn_(y); }
  const std::string& family() const { return family_; }
  DensityField scaled(double s) const;

  /// sup |g| sampled over Gamma.
  double sup_norm(const InterfaceGraph& gamma, int resolution = 512) const;
  /// inf g sampled over Gamma.
  double inf_value(const InterfaceGraph& gamma, int resolution = 512) const;
  /// sup |g(x) - g(0)| / |x|^alpha over sampled x in Gamma, x != 0.
  double holder_at_origin(const InterfaceGraph& gamma, double alpha, int resolution = 512) const;
  /// sup |g - 1| over Gamma (the delta of the stability hypothesis).
  double oscillation_from_one(const InterfaceGraph& gamma, int resolution = 512) const;

 private:
  std::string family_;
  Fn fn_;
};

}  // namespace translab
