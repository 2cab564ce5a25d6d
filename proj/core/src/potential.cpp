#include "translab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>

#include "translab/parallel.hpp"

namespace translab {

// ---- kernels ---------------------------------------------------------------------

namespace detail {

double green_unit(const Vec3& x, const Vec3& y, int n) {
  const Vec3 d = x - y;
  const double dxy2 = dot(d, d);
  const double q = dot(x, x) * dot(y, y) - 2.0 * dot(x, y) + 1.0;
  if (n == 2) return std::log(dxy2 / q) / (4.0 * kPi);
  return -(1.0 / std::sqrt(dxy2) - 1.0 / std::sqrt(q)) / (4.0 * kPi);
}

Vec3 green_unit_gradient(const Vec3& x, const Vec3& y, int n) {
  const Vec3 d = x - y;
  const double dxy2 = dot(d, d);
  const double yy = dot(y, y);
  const double q = dot(x, x) * yy - 2.0 * dot(x, y) + 1.0;
  const Vec3 img = yy * x - y;
  if (n == 2) {
    const double c = 1.0 / (2.0 * kPi);
    return (c / dxy2) * d - (c / q) * img;
  }
  const double c = 1.0 / (4.0 * kPi);
  return (c / (dxy2 * std::sqrt(dxy2))) * d - (c / (q * std::sqrt(q))) * img;
}

}  // namespace detail

namespace {

void check_kernel_args(const Vec3& x, const Vec3& y, int n) {
  if (n != 2 && n != 3) throw DomainError(fmt::format("Green kernel: unsupported dimension {}", n));
  if (!(dot(y, y) < 1.0)) throw DomainError(fmt::format("Green kernel: |y| = {} is not inside B_1", norm(y)));
  if (dot(x, x) > 1.0 + 1e-12) throw DomainError(fmt::format("Green kernel: |x| = {} is outside B_1", norm(x)));
  if (x == y) throw SingularityError("Green kernel evaluated at x = y");
}

Vec3 to_unit_ball(const Ball& b, const Vec3& x) { return (1.0 / b.radius) * (x - b.center); }

}  // namespace

double green_ball(const Vec3& x, const Vec3& y, int n) {
  check_kernel_args(x, y, n);
  return detail::green_unit(x, y, n);
}

Vec3 green_gradient(const Vec3& x, const Vec3& y, int n) {
  check_kernel_args(x, y, n);
  return detail::green_unit_gradient(x, y, n);
}

double green_in_ball(const Ball& ball, const Vec3& x, const Vec3& y, int n) {
  const double scale = n == 2 ? 1.0 : 1.0 / ball.radius;
  return scale * green_ball(to_unit_ball(ball, x), to_unit_ball(ball, y), n);
}

Vec3 green_gradient_in_ball(const Ball& ball, const Vec3& x, const Vec3& y, int n) {
  const double scale = std::pow(ball.radius, 1 - n);
  return scale * green_gradient(to_unit_ball(ball, x), to_unit_ball(ball, y), n);
}

// ---- single layer ----------------------------------------------------------------------

SingleLayer::SingleLayer(std::shared_ptr<const InterfaceGraph> gamma, std::shared_ptr<const DensityField> g,
                         Ball ball, LayerOptions opts)
    : gamma_(std::move(gamma)), g_(std::move(g)), ball_(ball), opts_(opts), dim_(gamma_->dimension()) {
  support_ = chord_set(*gamma_, ball_.center, ball_.radius);
}

double SingleLayer::panel_width() const {
  return std::min(opts_.max_panel_width, 2.0 * gamma_->feature_scale());
}

namespace {

// Geometric ladder of breakpoints around a near-singular parameter value.
void add_graded_points(std::vector<double>& out, double centre, double dist, double width) {
  out.push_back(centre);
  if (!(dist > 0.0)) return;
  for (double s = dist; s < width; s *= 2.0) {
    out.push_back(centre - s);
    out.push_back(centre + s);
  }
}

}  // namespace

template <class Kernel>
QuadResult SingleLayer::integrate(const Vec3& x, Kernel&& kernel) const {
  QuadResult total;
  if (support_.empty) return total;
  AdaptiveOptions ao;
  ao.panel_tol = opts_.panel_tol;
  ao.panel_order = opts_.panel_order;
  const double width = panel_width();
  const double dist = std::abs(x[2] - gamma_->height(tangential(x)));
  const InterfaceGraph& gam = *gamma_;
  const DensityField& g = *g_;
  if (dim_ == 2) {
    std::vector<double> extra;
    add_graded_points(extra, x[0], dist, width);
    auto f = [&](double t) {
      const Vec2 yp{t, 0.0};
      const Vec3 y = gam.lift_point(yp);
      return kernel(y) * g(y) * gam.area_element(yp);
    };
    for (auto [a, b] : support_.intervals) {
      const auto br = make_breakpoints(a, b, width, extra);
      total += integrate_adaptive(f, br, ao);
    }
    return total;
  }
  // n = 3: polar coordinates about the projection of x when it lies in the
  // support, which absorbs the 1/r singularity into the Jacobian.
  const Vec2 xp = tangential(x);
  const Vec2 pole = chord_contains(gam, support_, xp) ? xp : support_.pole;
  double inner_error = 0.0;
  std::size_t inner_evals = 0;
  auto radial = [&](double phi) {
    const Vec2 dir{std::cos(phi), std::sin(phi)};
    const double rmax = chord_radial_extent(gam, support_, phi, &pole);
    std::vector<double> extra;
    if (pole == xp) add_graded_points(extra, 0.0, dist, width);
    const auto br = make_breakpoints(0.0, rmax, width, extra);
    auto f = [&](double rho) {
      const Vec2 yp = pole + rho * dir;
      const Vec3 y = gam.lift_point(yp);
      return kernel(y) * g(y) * gam.area_element(yp) * rho;
    };
    const QuadResult r = integrate_adaptive(f, br, ao);
    inner_error = std::max(inner_error, r.error);
    inner_evals += r.evaluations;
    return r.value;
  };
  const auto br = make_breakpoints(0.0, 2.0 * kPi, kPi / 4.0);
  AdaptiveOptions outer = ao;
  outer.max_depth = 12;
  total = integrate_adaptive(radial, br, outer);
  total.error += 2.0 * kPi * inner_error;
  total.evaluations += inner_evals;
  return total;
}

EvalResult SingleLayer::value(const Vec3& x) const {
  const Vec3 xu = to_unit_ball(ball_, x);
  if (dot(xu, xu) > 1.0 + 1e-12) {
    throw DomainError(fmt::format("single layer: point at distance {} from the ball centre exceeds radius {}",
                                  norm(x - ball_.center), ball_.radius));
  }
  if (dot(xu, xu) >= 1.0 - 1e-14) return {0.0, 0.0, false, false};
  const int n = dim_;
  const double scale = n == 2 ? 1.0 : 1.0 / ball_.radius;
  const QuadResult q = integrate(x, [&](const Vec3& y) {
    return scale * detail::green_unit(xu, to_unit_ball(ball_, y), n);
  });
  EvalResult out{q.value, q.error, false, false};
  const Vec2 xp = tangential(x);
  if (gamma_->in_parameter_domain(xp)) {
    const double dist = std::abs(x[2] - gamma_->height(xp));
    out.on_interface = dist == 0.0;
    out.near_interface = dist < opts_.near_factor * panel_width();
  }
  if (out.near_interface) out.error *= 10.0;
  if (out.on_interface) out.error *= 10.0;
  return out;
}

GradResult SingleLayer::gradient(const Vec3& x) const {
  const Vec3 xu = to_unit_ball(ball_, x);
  if (dot(xu, xu) > 1.0 + 1e-12) throw DomainError("single layer gradient: point outside the kernel ball");
  const int n = dim_;
  const double scale = std::pow(ball_.radius, 1 - n);
  GradResult out;
  for (int c = 0; c < 3; ++c) {
    if (n == 2 && c == 1) continue;
    const QuadResult q = integrate(x, [&](const Vec3& y) {
      return scale * detail::green_unit_gradient(xu, to_unit_ball(ball_, y), n)[c];
    });
    out.gradient[c] = q.value;
    out.error = std::max(out.error, q.error);
  }
  return out;
}

// ---- Poisson extension ----------------------------------------------------------------

PoissonExtension::PoissonExtension(int dim, BoundaryData f, Ball ball, int order)
    : dim_(dim), f_(std::move(f)), ball_(ball), order_(order) {
  if (dim_ != 2 && dim_ != 3) throw DomainError("poisson_extend: unsupported dimension");
}

Vec3 PoissonExtension::to_unit(const Vec3& x) const {
  const Vec3 xu = to_unit_ball(ball_, x);
  if (dot(xu, xu) > 1.0 + 1e-12) throw DomainError("poisson_extend: evaluation point outside the ball");
  return xu;
}

std::shared_ptr<PoissonExtension> PoissonExtension::from_trace(int dim, const BoundaryData& f, Ball ball,
                                                               int samples) {
  std::shared_ptr<PoissonExtension> p(new PoissonExtension());
  p->dim_ = dim;
  p->ball_ = ball;
  p->sampled_ = true;
  if (dim == 2) {
    const int m = std::max(8, samples + (samples % 2));
    std::vector<double> vals(m), ct(m), st(m);
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * j / m;
      ct[j] = std::cos(th);
      st[j] = std::sin(th);
    }
    for (int j = 0; j < m; ++j) {
      vals[j] = f(ball.center + ball.radius * Vec3{ct[j], 0.0, st[j]});
      if (!std::isfinite(vals[j])) throw EvaluationError("poisson_extend: non-finite boundary sample");
      p->trace_sup_ = std::max(p->trace_sup_, std::abs(vals[j]));
    }
    const int kmax = m / 2;
    p->re_.assign(kmax + 1, 0.0);
    p->im_.assign(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
      double a = 0.0, b = 0.0;
      for (int j = 0; j < m; ++j) {
        const int idx = static_cast<int>((static_cast<long long>(k) * j) % m);
        a += vals[j] * ct[idx];
        b += vals[j] * st[idx];
      }
      const double w = (k == 0 || k == kmax) ? 1.0 / m : 2.0 / m;
      p->re_[k] = w * a;
      p->im_[k] = -w * b;
    }
    return p;
  }
  const int mt = std::max(8, static_cast<int>(std::sqrt(samples / 2.0)));
  const int mp = 2 * mt;
  const GaussRule& rule = gauss_legendre(mt);
  for (int i = 0; i < mt; ++i) {
    const double ct = rule.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < mp; ++j) {
      const double ph = 2.0 * kPi * j / mp;
      const Vec3 z{s * std::cos(ph), s * std::sin(ph), ct};
      const double v = f(ball.center + ball.radius * z);
      if (!std::isfinite(v)) throw EvaluationError("poisson_extend: non-finite boundary sample");
      p->nodes_.push_back(z);
      p->weights_.push_back(rule.weights[i] * 2.0 * kPi / mp);
      p->values_.push_back(v);
      p->trace_sup_ = std::max(p->trace_sup_, std::abs(v));
    }
  }
  return p;
}

namespace {

struct SphereFrame {
  Vec3 e1, e2, e3;
};

SphereFrame frame_towards(const Vec3& x) {
  const double r = norm(x);
  Vec3 e3 = r > 0.0 ? (1.0 / r) * x : Vec3{0.0, 0.0, 1.0};
  Vec3 t = std::abs(e3[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  Vec3 e1 = t - dot(t, e3) * e3;
  e1 = (1.0 / norm(e1)) * e1;
  const Vec3 e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2], e3[0] * e1[1] - e3[1] * e1[0]};
  return {e1, e2, e3};
}

// Poisson kernel of the unit ball and its x-gradient.
double poisson_kernel(const Vec3& x, const Vec3& z, int n) {
  const Vec3 d = x - z;
  const double d2 = dot(d, d);
  const double num = 1.0 - dot(x, x);
  if (n == 2) return num / (2.0 * kPi * d2);
  return num / (4.0 * kPi * d2 * std::sqrt(d2));
}

Vec3 poisson_kernel_gradient(const Vec3& x, const Vec3& z, int n) {
  const Vec3 d = x - z;
  const double d2 = dot(d, d);
  const double num = 1.0 - dot(x, x);
  if (n == 2) {
    const double c = 1.0 / (2.0 * kPi * d2 * d2);
    return (c * -2.0 * d2) * x - (c * 2.0 * num) * d;
  }
  const double d5 = d2 * d2 * std::sqrt(d2);
  const double c = 1.0 / (4.0 * kPi * d5);
  return (c * -2.0 * d2) * x - (c * 3.0 * num) * d;
}

}  // namespace

EvalResult PoissonExtension::value(const Vec3& x) const {
  const Vec3 xu = to_unit(x);
  const double r2 = dot(xu, xu);
  if (sampled_ && dim_ == 2) {
    const std::complex<double> z(xu[0], xu[2]);
    std::complex<double> acc(0.0, 0.0);
    for (int k = static_cast<int>(re_.size()) - 1; k >= 0; --k) acc = acc * z + std::complex<double>(re_[k], im_[k]);
    const int kmax = static_cast<int>(re_.size()) - 1;
    const double tail = std::hypot(re_[kmax], im_[kmax]) + std::hypot(re_[kmax - 1], im_[kmax - 1]);
    return {acc.real(), tail, false, false};
  }
  if (sampled_) {
    if (r2 >= 1.0 - 1e-14) {
      // On the sphere: nearest cached sample.
      std::size_t best = 0;
      double bd = INFINITY;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double d = dot(nodes_[i] - xu, nodes_[i] - xu);
        if (d < bd) bd = d, best = i;
      }
      return {values_[best], 0.0, false, false};
    }
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * poisson_kernel(xu, nodes_[i], 3) * values_[i];
    return {s, 0.0, false, false};
  }
  if (r2 >= 1.0 - 1e-15) return {f_(ball_.center + ball_.radius * ((1.0 / std::sqrt(r2)) * xu)), 0.0, false, false};
  const double gap = 1.0 - std::sqrt(r2);
  AdaptiveOptions ao;
  ao.panel_tol = 1e-14;
  if (dim_ == 2) {
    const double th0 = std::atan2(xu[2], xu[0]);
    std::vector<double> extra;
    add_graded_points(extra, th0, gap, kPi / 8.0);
    const auto br = make_breakpoints(th0 - kPi, th0 + kPi, kPi / 8.0, extra);
    const QuadResult q = integrate_adaptive(
        [&](double th) {
          const Vec3 z{std::cos(th), 0.0, std::sin(th)};
          return poisson_kernel(xu, z, 2) * f_(ball_.center + ball_.radius * z);
        },
        br, ao);
    return {q.value, q.error, false, false};
  }
  const SphereFrame fr = frame_towards(xu);
  const int mb = std::max(16, 2 * order_);
  std::vector<double> extra;
  add_graded_points(extra, 0.0, gap, kPi / 8.0);
  const auto br = make_breakpoints(0.0, kPi, kPi / 8.0, extra);
  const QuadResult q = integrate_adaptive(
      [&](double a) {
        const double ca = std::cos(a), sa = std::sin(a);
        double ring = 0.0;
        for (int j = 0; j < mb; ++j) {
          const double b = 2.0 * kPi * j / mb;
          const Vec3 z = ca * fr.e3 + (sa * std::cos(b)) * fr.e1 + (sa * std::sin(b)) * fr.e2;
          ring += poisson_kernel(xu, z, 3) * f_(ball_.center + ball_.radius * z);
        }
        return ring * (2.0 * kPi / mb) * sa;
      },
      br, ao);
  return {q.value, q.error, false, false};
}

GradResult PoissonExtension::gradient(const Vec3& x) const {
  const Vec3 xu = to_unit(x);
  const double inv_r = 1.0 / ball_.radius;
  if (sampled_ && dim_ == 2) {
    const std::complex<double> z(xu[0], xu[2]);
    std::complex<double> acc(0.0, 0.0);
    for (int k = static_cast<int>(re_.size()) - 1; k >= 1; --k) {
      acc = acc * z + static_cast<double>(k) * std::complex<double>(re_[k], im_[k]);
    }
    return {{inv_r * acc.real(), 0.0, -inv_r * acc.imag()}, 0.0};
  }
  if (sampled_) {
    Vec3 s{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      s = s + (weights_[i] * values_[i]) * poisson_kernel_gradient(xu, nodes_[i], 3);
    }
    return {inv_r * s, 0.0};
  }
  const double r2 = dot(xu, xu);
  if (r2 >= 1.0 - 1e-12) throw DomainError("poisson_extend: gradient requested on the sphere");
  const double gap = 1.0 - std::sqrt(r2);
  AdaptiveOptions ao;
  ao.panel_tol = 1e-13;
  GradResult out;
  for (int c = 0; c < 3; ++c) {
    if (dim_ == 2 && c == 1) continue;
    QuadResult q;
    if (dim_ == 2) {
      const double th0 = std::atan2(xu[2], xu[0]);
      std::vector<double> extra;
      add_graded_points(extra, th0, gap, kPi / 8.0);
      const auto br = make_breakpoints(th0 - kPi, th0 + kPi, kPi / 8.0, extra);
      q = integrate_adaptive(
          [&](double th) {
            const Vec3 z{std::cos(th), 0.0, std::sin(th)};
            return poisson_kernel_gradient(xu, z, 2)[c] * f_(ball_.center + ball_.radius * z);
          },
          br, ao);
    } else {
      const SphereFrame fr = frame_towards(xu);
      const int mb = std::max(16, 2 * order_);
      std::vector<double> extra;
      add_graded_points(extra, 0.0, gap, kPi / 8.0);
      const auto br = make_breakpoints(0.0, kPi, kPi / 8.0, extra);
      q = integrate_adaptive(
          [&](double a) {
            const double ca = std::cos(a), sa = std::sin(a);
            double ring = 0.0;
            for (int j = 0; j < mb; ++j) {
              const double b = 2.0 * kPi * j / mb;
              const Vec3 z = ca * fr.e3 + (sa * std::cos(b)) * fr.e1 + (sa * std::sin(b)) * fr.e2;
              ring += poisson_kernel_gradient(xu, z, 3)[c] * f_(ball_.center + ball_.radius * z);
            }
            return ring * (2.0 * kPi / mb) * sa;
          },
          br, ao);
    }
    out.gradient[c] = inv_r * q.value;
    out.error = std::max(out.error, inv_r * q.error);
  }
  return out;
}

// ---- solution fields --------------------------------------------------------------------

SolutionField& SolutionField::add(std::shared_ptr<const FieldTerm> term, double coef) {
  terms_.emplace_back(coef, std::move(term));
  return *this;
}

SolutionField& SolutionField::set_interface(std::shared_ptr<const InterfaceGraph> gamma) {
  gamma_ = std::move(gamma);
  return *this;
}

SolutionField& SolutionField::set_density(std::shared_ptr<const DensityField> g) {
  g_ = std::move(g);
  return *this;
}

EvalResult SolutionField::value(const Vec3& x) const {
  EvalResult out;
  for (const auto& [c, t] : terms_) {
    if (c == 0.0) continue;
    const EvalResult r = t->value(x);
    out.value += c * r.value;
    out.error += std::abs(c) * r.error;
    out.near_interface = out.near_interface || r.near_interface;
    out.on_interface = out.on_interface || r.on_interface;
  }
  return out;
}

GradResult SolutionField::gradient(const Vec3& x) const {
  GradResult out;
  for (const auto& [c, t] : terms_) {
    if (c == 0.0) continue;
    const GradResult r = t->gradient(x);
    out.gradient = out.gradient + c * r.gradient;
    out.error += std::abs(c) * r.error;
  }
  return out;
}

Side SolutionField::side(const Vec3& x) const {
  if (!gamma_) return Side::Unclassified;
  return gamma_->side(x);
}

SolutionField SolutionField::scaled(double s) const {
  SolutionField out = *this;
  for (auto& term : out.terms_) term.first *= s;
  if (g_) out.g_ = std::make_shared<DensityField>(g_->scaled(s));
  return out;
}

SolutionField SolutionField::combine(double a, const SolutionField& u, double b, const SolutionField& v) {
  SolutionField out(u.dim_);
  for (const auto& [c, t] : u.terms_) out.terms_.emplace_back(a * c, t);
  for (const auto& [c, t] : v.terms_) out.terms_.emplace_back(b * c, t);
  out.gamma_ = u.gamma_;
  out.g_ = u.g_;
  return out;
}

std::vector<double> SolutionField::evaluate(std::span<const Vec3> points, int threads) const {
  std::vector<double> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) { out[i] = value(points[i]).value; });
  return out;
}

SolutionField single_layer_solve(std::shared_ptr<const InterfaceGraph> gamma,
                                 std::shared_ptr<const DensityField> g, LayerOptions opts) {
  const double sup = g->sup_norm(*gamma);
  if (!std::isfinite(sup)) throw EvaluationError("single_layer_solve: density is not bounded on Gamma");
  SolutionField u(gamma->dimension());
  u.add(std::make_shared<SingleLayer>(gamma, g, Ball{}, opts));
  u.set_interface(gamma).set_density(g);
  return u;
}

SolutionField single_layer_solve(const InterfaceGraph& gamma, const DensityField& g, LayerOptions opts) {
  return single_layer_solve(std::make_shared<InterfaceGraph>(gamma), std::make_shared<DensityField>(g), opts);
}

SolutionField poisson_extend(const BoundaryData& f, int n, int order) {
  SolutionField h(n);
  h.add(std::make_shared<PoissonExtension>(n, f, Ball{}, order));
  return h;
}

// ---- test functions and the distributional identity ----------------------------------------

double TestFunction::value(const Vec3& x) const {
  const Vec3 d = x - center;
  const double s = dot(d, d) / (radius * radius);
  if (s >= 1.0) return 0.0;
  const double t = 1.0 - s;
  return t * t * t * t;
}

double TestFunction::laplacian(const Vec3& x) const {
  const Vec3 d = x - center;
  const double s = dot(d, d) / (radius * radius);
  if (s >= 1.0) return 0.0;
  const double t = 1.0 - s;
  return -(8.0 / (radius * radius)) * t * t * (dimension * t - 6.0 * s);
}

Vec3 TestFunction::gradient(const Vec3& x) const {
  const Vec3 d = x - center;
  const double s = dot(d, d) / (radius * radius);
  if (s >= 1.0) return {0.0, 0.0, 0.0};
  const double t = 1.0 - s;
  return (-8.0 * t * t * t / (radius * radius)) * d;
}

namespace {

// Angles theta in (lo, hi) where the column over c' + r sin(theta) dir stops
// meeting Gamma, i.e. where Gamma crosses the sphere; the column integral has
// a kink there.
std::vector<double> column_crossings(const InterfaceGraph& gamma, const Vec3& c, double r, const Vec2& dir,
                                     double lo, double hi) {
  auto F = [&](double th) {
    const Vec2 xp{c[0] + r * std::sin(th) * dir[0], c[1] + r * std::sin(th) * dir[1]};
    if (!gamma.in_parameter_domain(xp)) return 1.0;
    const double d = gamma.height(xp) - c[2];
    const double h = r * std::cos(th);
    return d * d - h * h;
  };
  const int m = std::max(64, static_cast<int>(std::ceil(8.0 * r / gamma.feature_scale())));
  std::vector<double> out;
  double a = lo, fa = F(lo);
  for (int i = 1; i <= m; ++i) {
    const double b = lo + (hi - lo) * i / m;
    const double fb = F(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-15; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = F(mid);
        if ((fm < 0.0) == (f0 < 0.0)) x0 = mid, f0 = fm; else x1 = mid;
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return out;
}

double integrate_ball_fixed(int dim, const std::function<double(const Vec3&)>& F, const Vec3& c, double r,
                            const InterfaceGraph* gamma, int order) {
  const GaussRule& inner = gauss_legendre(order);
  auto column = [&](const Vec2& xp, double h) {
    const double lo = c[2] - h;
    const double hi = c[2] + h;
    auto fx = [&](double xn) { return F(lift(xp, xn)); };
    if (gamma && gamma->in_parameter_domain(xp)) {
      const double split = gamma->height(xp);
      if (split > lo && split < hi) return gauss_fixed(fx, lo, split, inner) + gauss_fixed(fx, split, hi, inner);
    }
    return gauss_fixed(fx, lo, hi, inner);
  };
  const double feature = gamma ? gamma->feature_scale() : 1.0;
  if (dim == 2) {
    // x_1 = c_1 + r sin(theta); the column half-height is r cos(theta).
    const int panels = std::max(2, static_cast<int>(std::ceil(kPi * r / feature)));
    const GaussRule& outer = gauss_legendre(order);
    std::vector<double> extra;
    if (std::abs(c[0]) < r) extra.push_back(std::asin(-c[0] / r));
    if (gamma) {
      for (double th : column_crossings(*gamma, c, r, {1.0, 0.0}, -0.5 * kPi, 0.5 * kPi)) extra.push_back(th);
    }
    const auto br = make_breakpoints(-0.5 * kPi, 0.5 * kPi, kPi / panels, extra);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      total += gauss_fixed(
          [&](double th) {
            const double h = r * std::cos(th);
            return column({c[0] + r * std::sin(th), 0.0}, h) * h;
          },
          br[p], br[p + 1], outer);
    }
    return total;
  }
  // n = 3: x' = c' + r sin(theta) (cos phi, sin phi), column half-height r cos(theta).
  const int panels = std::max(1, static_cast<int>(std::ceil(0.5 * kPi * r / feature)));
  const GaussRule& outer = gauss_legendre(order);
  const int nphi = std::max(2 * order, static_cast<int>(std::ceil(2.0 * order * r / feature)));
  double total = 0.0;
  for (int k = 0; k < nphi; ++k) {
    const double phi = 2.0 * kPi * k / nphi;
    const Vec2 dir{std::cos(phi), std::sin(phi)};
    std::vector<double> extra;
    if (gamma) extra = column_crossings(*gamma, c, r, dir, 0.0, 0.5 * kPi);
    const auto br = make_breakpoints(0.0, 0.5 * kPi, 0.5 * kPi / panels, extra);
    double ring = 0.0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
      ring += gauss_fixed(
          [&](double th) {
            const double rho = r * std::sin(th);
            const double h = r * std::cos(th);
            const Vec2 xp{c[0] + rho * dir[0], c[1] + rho * dir[1]};
            return column(xp, h) * rho * h;
          },
          br[p], br[p + 1], outer);
    }
    total += ring * (2.0 * kPi / nphi);
  }
  return total;
}

}  // namespace

QuadResult integrate_ball(int dim, const std::function<double(const Vec3&)>& F, const Vec3& center,
                          double radius, const InterfaceGraph* gamma, int order) {
  const double lo = integrate_ball_fixed(dim, F, center, radius, gamma, order);
  const double hi = integrate_ball_fixed(dim, F, center, radius, gamma, 2 * order);
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw EvaluationError("volume integrand is not finite");
  return {hi, std::abs(hi - lo), 0};
}

DistributionalCheck verify_distributional(const SolutionField& u, const InterfaceGraph& gamma,
                                          const DensityField& g, const TestFunction& phi, int volume_order,
                                          int surface_order) {
  if (norm(phi.center) + phi.radius >= 1.0) {
    throw DomainError("verify_distributional: test function support must lie inside B_1");
  }
  DistributionalCheck out;
  const QuadResult vol = integrate_ball(
      u.dimension(), [&](const Vec3& x) { return u(x) * phi.laplacian(x); }, phi.center, phi.radius, &gamma,
      volume_order);
  const ChordSet set = chord_set(gamma, phi.center, phi.radius);
  const QuadResult surf =
      chord_integral(gamma, set, [&](const Vec3& y) { return g(y) * phi.value(y); }, surface_order);
  out.volume_term = vol.value;
  out.volume_error = vol.error;
  out.surface_term = surf.value;
  out.surface_error = surf.error;
  out.residual = std::abs(vol.value - surf.value);
  return out;
}

}  // namespace translab
