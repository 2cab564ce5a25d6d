#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "translab/geometry.hpp"

namespace translab::testing {

struct FuzzTally {
  long configs = 0;
  long outer_checks = 0;
  long inner_checks = 0;
  long outer_violations = 0;
  long inner_violations = 0;
};

// Random admissible (theta, eps, x, psi) with dist(x, Gamma) < eps; psi is a
// two-mode sinusoid scaled strictly inside the theta*eps slab. Every sampled
// y' is checked against the two inclusions of inclusion_radii.
inline FuzzTally inclusion_fuzz(long configs, std::uint64_t seed, int samples = 48) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FuzzTally tally;
  for (long c = 0; c < configs; ++c) {
    const int n = c % 2 == 0 ? 2 : 3;
    StabilityParams p;
    p.theta = 0.5 * unit(rng);
    p.eps = 0.01 + 0.29 * unit(rng);
    p.delta = 0.1;
    const double te = p.theta * p.eps;
    const double a1 = unit(rng), a2 = unit(rng);
    const double f1 = 1.0 + 40.0 * unit(rng), f2 = 1.0 + 40.0 * unit(rng);
    const double p1 = 6.3 * unit(rng), p2 = 6.3 * unit(rng);
    const double scale = 0.999999 * te / (a1 + a2);
    auto psi = [&](const Vec2& y) {
      return scale * (a1 * std::sin(f1 * y[0] + p1) + a2 * std::sin(f2 * (0.6 * y[0] + 0.8 * y[1]) + p2));
    };
    const double reach = 1.0 - p.M() * p.eps;
    Vec3 x;
    for (;;) {
      Vec2 y0{2.0 * unit(rng) - 1.0, n == 3 ? 2.0 * unit(rng) - 1.0 : 0.0};
      y0 = reach * y0;
      x = lift(y0, psi(y0) + p.eps * (2.0 * unit(rng) - 1.0));
      if (norm(x) < reach) break;
    }
    const InclusionRadii r = inclusion_radii(p, x);
    ++tally.configs;
    const Vec2 xp = tangential(x);
    auto draw_disk = [&](double radius) {
      const double rho = radius * (n == 2 ? unit(rng) : std::sqrt(unit(rng)));
      const double phi = 2.0 * kPi * unit(rng);
      return n == 2 ? Vec2{xp[0] + (unit(rng) < 0.5 ? -rho : rho), 0.0}
                    : Vec2{xp[0] + rho * std::cos(phi), xp[1] + rho * std::sin(phi)};
    };
    for (int s = 0; s < samples; ++s) {
      // Only y' within eps of x' can put (y', psi(y')) into B_eps(x).
      const Vec2 y = draw_disk(p.eps);
      const Vec3 on_gamma = lift(y, psi(y));
      if (norm(on_gamma - x) < p.eps) {
        ++tally.outer_checks;
        const Vec2 d = y - xp;
        if (!r.outer || dot(d, d) >= (*r.outer) * (*r.outer) * (1.0 + 1e-12)) ++tally.outer_violations;
      }
      if (r.inner) {
        const Vec2 z = draw_disk(*r.inner);
        ++tally.inner_checks;
        if (!(norm(lift(z, psi(z)) - x) < p.M() * p.eps * (1.0 + 1e-12))) ++tally.inner_violations;
      }
    }
  }
  return tally;
}

}  // namespace translab::testing
