#include "translab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace translab {

std::string to_string(InterfaceFamily f) {
  switch (f) {
    case InterfaceFamily::Flat: return "flat";
    case InterfaceFamily::Linear: return "linear";
    case InterfaceFamily::Sinusoid: return "sinusoid";
    case InterfaceFamily::Cusp: return "cusp";
    case InterfaceFamily::Custom: return "custom";
  }
  return "custom";
}

InterfaceGraph::InterfaceGraph(int dimension, InterfaceFamily family, Profile profile,
                               Gradient gradient, double feature_scale, HolderMetadata holder,
                               double radius)
    : dim_(dimension),
      family_(family),
      profile_(std::move(profile)),
      gradient_(std::move(gradient)),
      feature_scale_(feature_scale),
      holder_(holder),
      radius_(radius) {
  if (dim_ != 2 && dim_ != 3) throw ConfigError(fmt::format("unsupported dimension {}", dim_));
  if (!(radius_ > 0.0)) throw ConfigError("interface parameter radius must be positive");
  if (!(feature_scale_ > 0.0)) throw ConfigError("interface feature scale must be positive");
}

double InterfaceGraph::area_element(const Vec2& xp) const {
  const Vec2 g = gradient_(xp);
  return std::sqrt(1.0 + dot(g, g));
}

double InterfaceGraph::vertical_offset(const Vec3& x) const { return x[2] - profile_(tangential(x)); }

Side InterfaceGraph::side(const Vec3& x) const {
  const double d = vertical_offset(x);
  if (d > 0.0) return Side::Upper;
  if (d < 0.0) return Side::Lower;
  return Side::Interface;
}

InterfaceGraph InterfaceGraph::scaled(double s) const {
  auto p = profile_;
  auto g = gradient_;
  HolderMetadata h = holder_;
  h.seminorm_at_origin *= std::abs(s);
  h.seminorm_bound *= std::abs(s);
  InterfaceGraph out(
      dim_, family_, [p, s](const Vec2& xp) { return s * p(xp); },
      [g, s](const Vec2& xp) { return s * g(xp); }, feature_scale_, h, radius_);
  out.downward_ = downward_;
  return out;
}

InterfaceSample eval_interface(const InterfaceGraph& gamma, const Vec2& xp) {
  if (!gamma.in_parameter_domain(xp)) {
    throw DomainError(fmt::format("eval_interface: |x'| = {} is outside the parameter ball of radius {}",
                                  norm(xp), gamma.radius()));
  }
  const Vec2 g = gamma.slope(xp);
  const double j = std::sqrt(1.0 + dot(g, g));
  const double sgn = gamma.downward_normal() ? -1.0 : 1.0;
  return {gamma.lift_point(xp), {sgn * -g[0] / j, sgn * -g[1] / j, sgn * 1.0 / j}, j};
}

namespace {

int effective_resolution(const InterfaceGraph& gamma, int resolution) {
  const int from_features =
      static_cast<int>(std::ceil(16.0 * gamma.radius() / gamma.feature_scale()));
  return std::clamp(std::max(resolution, from_features), 2, 200000);
}

}  // namespace

namespace {

// Golden-section maximisation of f on [a, b]: (argmax, max).
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc, c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd, d = a + r * (b - a), fd = f(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Grid sup of f over the parameter ball, polished by golden-section search
// around grid maxima (every local one in n = 2, the global one per axis in n = 3).
template <class F>
double parameter_sup(const InterfaceGraph& gamma, int res, F&& f) {
  const double R = gamma.radius();
  if (gamma.dimension() == 2) {
    std::vector<double> v(res + 1);
    const double h = 2.0 * R / res;
    for (int i = 0; i <= res; ++i) v[i] = f(Vec2{-R + h * i, 0.0});
    double best = *std::max_element(v.begin(), v.end());
    for (int i = 0; i <= res; ++i) {
      const bool left = i == 0 || v[i] >= v[i - 1];
      const bool right = i == res || v[i] >= v[i + 1];
      if (!(left && right)) continue;
      const double a = std::max(-R, -R + h * (i - 1)), b = std::min(R, -R + h * (i + 1));
      best = std::max(best, golden_max([&](double t) { return f(Vec2{t, 0.0}); }, a, b).second);
    }
    return best;
  }
  const int res2 = std::min(res, 2048);
  const double h = 2.0 * R / res2;
  double best = -INFINITY;
  Vec2 arg{0.0, 0.0};
  for (int i = 0; i <= res2; ++i) {
    for (int j = 0; j <= res2; ++j) {
      const Vec2 xp{-R + h * i, -R + h * j};
      if (dot(xp, xp) > R * R) continue;
      const double val = f(xp);
      if (val > best) best = val, arg = xp;
    }
  }
  auto g = [&](const Vec2& xp) { return dot(xp, xp) <= R * R ? f(xp) : -INFINITY; };
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int k = 0; k < 2; ++k) {
      const auto [t, val] = golden_max([&](double s) { Vec2 q = arg; q[k] = s; return g(q); }, arg[k] - h, arg[k] + h);
      if (val > best) best = val, arg[k] = t;
    }
  }
  return best;
}

}  // namespace

FlatnessReport flatness_horizontality(const InterfaceGraph& gamma, int resolution) {
  const int res = effective_resolution(gamma, resolution);
  FlatnessReport rep;
  rep.flatness = parameter_sup(gamma, res, [&](const Vec2& xp) { return std::abs(gamma.height(xp)); });
  rep.horizontality = 1.0 / parameter_sup(gamma, res, [&](const Vec2& xp) { return gamma.area_element(xp); });
  return rep;
}

// ---- chord sets ------------------------------------------------------------

namespace {

double excess(const InterfaceGraph& gamma, const Vec3& c, double rad, const Vec2& yp) {
  const Vec3 d = gamma.lift_point(yp) - c;
  return dot(d, d) - rad * rad;
}

bool inside_set(const InterfaceGraph& gamma, const Vec3& c, double rad, const Vec2& yp) {
  return gamma.in_parameter_domain(yp) && excess(gamma, c, rad, yp) < 0.0;
}

template <class Pred>
double bisect_edge(Pred&& inside, double in, double out) {
  for (int it = 0; it < 200 && std::abs(out - in) > 0.0; ++it) {
    const double m = 0.5 * (in + out);
    if (m == in || m == out) break;
    (inside(m) ? in : out) = m;
  }
  return 0.5 * (in + out);
}

}  // namespace

ChordSet chord_set(const InterfaceGraph& gamma, const Vec3& center, double ball_radius) {
  ChordSet set;
  set.dimension = gamma.dimension();
  set.center = center;
  set.ball_radius = ball_radius;
  const double R = gamma.radius();
  if (gamma.dimension() == 2) {
    // Interior points of the domain: stop just short of |t| = R.
    const double lim = R * (1.0 - 1e-15);
    const double lo = std::max(-lim, center[0] - ball_radius);
    const double hi = std::min(lim, center[0] + ball_radius);
    if (!(hi > lo)) return set;
    const double step = std::min(ball_radius / 64.0, gamma.feature_scale() / 8.0);
    const int n = std::max(8, static_cast<int>(std::ceil((hi - lo) / step)));
    auto inside = [&](double t) { return inside_set(gamma, center, ball_radius, {t, 0.0}); };
    double prev_t = lo;
    bool prev_in = inside(lo);
    double start = lo;
    for (int i = 1; i <= n; ++i) {
      const double t = (i == n) ? hi : lo + (hi - lo) * i / n;
      const bool in = inside(t);
      if (in && !prev_in) start = bisect_edge(inside, t, prev_t);
      if (!in && prev_in) set.intervals.emplace_back(start, bisect_edge(inside, prev_t, t));
      prev_t = t;
      prev_in = in;
    }
    if (prev_in) set.intervals.emplace_back(start, hi);
    set.empty = set.intervals.empty();
    return set;
  }
  // n = 3: pick a pole inside the set, preferring the projection of center.
  const Vec2 cp = tangential(center);
  if (inside_set(gamma, center, ball_radius, cp)) {
    set.pole = cp;
    set.empty = false;
    return set;
  }
  double best = 0.0;
  const int m = 48;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const Vec2 yp{cp[0] + ball_radius * (2.0 * i / m - 1.0), cp[1] + ball_radius * (2.0 * j / m - 1.0)};
      if (!gamma.in_parameter_domain(yp)) continue;
      const double e = excess(gamma, center, ball_radius, yp);
      if (e < best) {
        best = e;
        set.pole = yp;
        set.empty = false;
      }
    }
  }
  return set;
}

bool chord_contains(const InterfaceGraph& gamma, const ChordSet& set, const Vec2& yp) {
  return inside_set(gamma, set.center, set.ball_radius, yp);
}

double chord_radial_extent(const InterfaceGraph& gamma, const ChordSet& set, double phi,
                           const Vec2* pole) {
  const Vec2 dir{std::cos(phi), std::sin(phi)};
  const Vec2 origin = pole ? *pole : set.pole;
  auto inside = [&](double rho) {
    return inside_set(gamma, set.center, set.ball_radius, origin + rho * dir);
  };
  const double reach = 2.0 * set.ball_radius + 2.0 * gamma.radius();
  const double step = std::min(set.ball_radius / 32.0, gamma.feature_scale() / 8.0);
  double rho = 0.0;
  while (rho < reach) {
    const double next = rho + step;
    if (!inside(next)) return bisect_edge(inside, rho, next);
    rho = next;
  }
  return rho;
}

namespace {

double chord_integral_fixed(const InterfaceGraph& gamma, const ChordSet& set,
                            const SurfaceFunction& f, int order) {
  const GaussRule& rule = gauss_legendre(order);
  auto pulled = [&](const Vec2& yp) { return f(gamma.lift_point(yp)) * gamma.area_element(yp); };
  const double width = std::min(0.5, gamma.feature_scale());
  double total = 0.0;
  if (set.dimension == 2) {
    for (auto [a, b] : set.intervals) {
      const auto br = make_breakpoints(a, b, width);
      for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        total += gauss_fixed([&](double t) { return pulled({t, 0.0}); }, br[p], br[p + 1], rule);
      }
    }
    return total;
  }
  const int nphi = std::max(2 * order, static_cast<int>(std::ceil(8.0 * kPi * set.ball_radius / width)));
  for (int k = 0; k < nphi; ++k) {
    const double phi = 2.0 * kPi * k / nphi;
    const Vec2 dir{std::cos(phi), std::sin(phi)};
    const double rmax = chord_radial_extent(gamma, set, phi);
    const auto br = make_breakpoints(0.0, rmax, width);
    double radial = 0.0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      radial += gauss_fixed([&](double rho) { return pulled(set.pole + rho * dir) * rho; }, br[p],
                            br[p + 1], rule);
    }
    total += radial * (2.0 * kPi / nphi);
  }
  return total;
}

}  // namespace

QuadResult chord_integral(const InterfaceGraph& gamma, const ChordSet& set, const SurfaceFunction& f,
                          int order) {
  if (set.empty) return {};
  const double lo = chord_integral_fixed(gamma, set, f, order);
  const double hi = chord_integral_fixed(gamma, set, f, 2 * order);
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw EvaluationError("surface integrand produced a non-finite sample");
  }
  return {hi, std::abs(hi - lo), 0};
}

QuadResult surface_integral(const InterfaceGraph& gamma, const SurfaceFunction& f, int order) {
  ChordSet whole;
  whole.dimension = gamma.dimension();
  whole.empty = false;
  whole.ball_radius = gamma.radius();
  const double lim = gamma.radius();
  if (gamma.dimension() == 2) {
    whole.intervals.emplace_back(-lim, lim);
    const double lo = chord_integral_fixed(gamma, whole, f, order);
    const double hi = chord_integral_fixed(gamma, whole, f, 2 * order);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw EvaluationError("surface integrand produced a non-finite sample");
    }
    return {hi, std::abs(hi - lo), 0};
  }
  // Polar rule over the full parameter disc; the extent is exactly the radius.
  auto fixed = [&](int ord) {
    const GaussRule& rule = gauss_legendre(ord);
    const double width = std::min(0.5, gamma.feature_scale());
    const int nphi = std::max(2 * ord, static_cast<int>(std::ceil(8.0 * kPi * lim / width)));
    const auto br = make_breakpoints(0.0, lim, width);
    double total = 0.0;
    for (int k = 0; k < nphi; ++k) {
      const double phi = 2.0 * kPi * k / nphi;
      const Vec2 dir{std::cos(phi), std::sin(phi)};
      double radial = 0.0;
      for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        radial += gauss_fixed(
            [&](double rho) {
              const Vec2 yp = rho * dir;
              return f(gamma.lift_point(yp)) * gamma.area_element(yp) * rho;
            },
            br[p], br[p + 1], rule);
      }
      total += radial * (2.0 * kPi / nphi);
    }
    return total;
  };
  const double lo = fixed(order);
  const double hi = fixed(2 * order);
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw EvaluationError("surface integrand produced a non-finite sample");
  }
  return {hi, std::abs(hi - lo), 0};
}

// ---- stability parameters and inclusion radii -------------------------------

void StabilityParams::validate() const {
  if (!(theta > 0.0 && theta < 0.5)) throw PreconditionError(fmt::format("theta = {} not in (0, 1/2)", theta));
  if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError(fmt::format("eps = {} not in (0, 1/2)", eps));
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError(fmt::format("delta = {} not in (0, 1)", delta));
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError(fmt::format("gamma = {} not in (0, 1)", gamma));
}

double StabilityParams::lower_barrier_density(int n) const {
  return std::pow(M(), n) * (1.0 + delta) / (1.0 - eps);
}

double StabilityParams::upper_barrier_density(int n) const {
  return std::pow(M(), -n) * (1.0 - delta);
}

double StabilityParams::eta(int n) const {
  return 0.5 * (lower_barrier_density(n) + upper_barrier_density(n)) - 1.0;
}

InclusionRadii inclusion_radii(const StabilityParams& params, const Vec3& x) {
  const double M = params.M();
  const double te = params.theta * params.eps;
  if (!(norm(x) < 1.0 - M * params.eps)) {
    throw DomainError(fmt::format("inclusion_radii: |x| = {} not inside B_(1 - M eps) = B_{}", norm(x),
                                  1.0 - M * params.eps));
  }
  InclusionRadii out;
  const double shift = x[2] + te;
  const double outer_sq = (M * params.eps) * (M * params.eps) - shift * shift;
  if (outer_sq > 0.0) out.outer = std::sqrt(outer_sq);
  const double inner_sq = params.eps * params.eps - shift * shift;
  if (x[2] < (1.0 - params.theta) * params.eps && inner_sq > 0.0) out.inner = std::sqrt(inner_sq);
  return out;
}

// ---- families ----------------------------------------------------------------

namespace {

double param(const FamilyParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double require(const FamilyParams& p, const std::string& family, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigError(fmt::format("interface family '{}' needs parameter '{}'", family, key));
  return it->second;
}

}  // namespace

InterfaceGraph make_test_interface(int dimension, const std::string& family, const FamilyParams& params) {
  if (dimension != 2 && dimension != 3) throw ConfigError(fmt::format("unsupported dimension {}", dimension));
  if (family == "flat") {
    const double level = param(params, "level", 0.0);
    const double radius = param(params, "radius", 1.0);
    HolderMetadata h{true, 1.0, 0.0, 0.0};
    return InterfaceGraph(
        dimension, InterfaceFamily::Flat, [level](const Vec2&) { return level; },
        [](const Vec2&) { return Vec2{0.0, 0.0}; }, 1.0, h, radius);
  }
  if (family == "linear") {
    const double s1 = require(params, family, "slope");
    const double s2 = dimension == 3 ? param(params, "slope2", 0.0) : 0.0;
    HolderMetadata h{true, 1.0, 0.0, 0.0};
    return InterfaceGraph(
        dimension, InterfaceFamily::Linear, [s1, s2](const Vec2& x) { return s1 * x[0] + s2 * x[1]; },
        [s1, s2](const Vec2&) { return Vec2{s1, s2}; }, 1.0, h);
  }
  if (family == "sinusoid") {
    const double amp = require(params, family, "amp");
    const double freq = require(params, family, "freq");
    const double phase = param(params, "phase", 0.0);
    if (!(freq > 0.0)) throw ConfigError("sinusoid frequency must be positive");
    const double feature = std::min(1.0, 0.25 * kPi / freq);
    HolderMetadata h{true, 1.0, std::abs(amp) * freq * freq, std::abs(amp) * freq * freq};
    return InterfaceGraph(
        dimension, InterfaceFamily::Sinusoid,
        [amp, freq, phase](const Vec2& x) { return amp * std::sin(freq * x[0] + phase); },
        [amp, freq, phase](const Vec2& x) { return Vec2{amp * freq * std::cos(freq * x[0] + phase), 0.0}; },
        feature, h);
  }
  if (family == "cusp") {
    const double c = require(params, family, "c");
    const double a0 = require(params, family, "alpha0");
    if (!(a0 > 0.0 && a0 < 1.0)) throw ConfigError(fmt::format("cusp exponent alpha0 = {} not in (0, 1)", a0));
    // grad psi = c (1 + a0) |x'|^(a0 - 1) x'; its C^{0,a0} seminorm at 0 is
    // c (1 + a0) and globally 2^(1 - a0) c (1 + a0) (attained at x' = -y').
    HolderMetadata h{true, a0, std::abs(c) * (1.0 + a0), std::pow(2.0, 1.0 - a0) * std::abs(c) * (1.0 + a0)};
    return InterfaceGraph(
        dimension, InterfaceFamily::Cusp,
        [c, a0](const Vec2& x) { return c * std::pow(norm(x), 1.0 + a0); },
        [c, a0](const Vec2& x) {
          const double r = norm(x);
          if (r == 0.0) return Vec2{0.0, 0.0};
          const double s = c * (1.0 + a0) * std::pow(r, a0 - 1.0);
          return Vec2{s * x[0], s * x[1]};
        },
        0.25, h);
  }
  throw ConfigError(fmt::format("unknown interface family '{}'", family));
}

InterfaceGraph admissible_sinusoid(int dimension, double theta, double eps) {
  const double amp = theta * eps;
  const double freq = std::sqrt(2.0 * eps) / amp;
  return make_test_interface(dimension, "sinusoid", {{"amp", amp}, {"freq", freq}});
}

}  // namespace translab
