#include "translab/regularity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fmt/format.h>
#include <random>

#include "translab/parallel.hpp"
#include "translab/stability.hpp"

namespace translab {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

HaltonSampler::HaltonSampler(int dim, std::uint64_t seed) : dim_(dim) {
  std::mt19937_64 rng(seed);
  for (double& s : shift_) s = uniform01(rng);
}

Vec3 HaltonSampler::next_in_ball() {
  static constexpr std::uint64_t bases[3] = {2, 3, 5};
  for (;;) {
    double c[3];
    for (int d = 0; d < 3; ++d) {
      double v = radical_inverse(index_, bases[d]) + shift_[d];
      c[d] = 2.0 * (v - std::floor(v)) - 1.0;
    }
    ++index_;
    const Vec3 p = dim_ == 2 ? make_point(c[0], 0.0, c[1]) : make_point(c[0], c[1], c[2]);
    if (dot(p, p) < 1.0) return p;
  }
}

// ---- normalization ------------------------------------------------------------------

double gradient_holder_seminorm(const InterfaceGraph& gamma, double alpha, int resolution) {
  const double R = gamma.radius() * (1.0 - 1e-12);
  std::vector<Vec2> xs;
  if (gamma.dimension() == 2) {
    for (int i = 0; i <= resolution; ++i) xs.push_back({-R + 2.0 * R * i / resolution, 0.0});
  } else {
    const int m = std::min(resolution, 40);
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        const Vec2 p{-R + 2.0 * R * i / m, -R + 2.0 * R * j / m};
        if (dot(p, p) < R * R) xs.push_back(p);
      }
    }
  }
  std::vector<Vec2> gs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) gs[i] = gamma.slope(xs[i]);
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const Vec2 dx = xs[i] - xs[j];
      const Vec2 dg = gs[i] - gs[j];
      best = std::max(best, norm(dg) / std::pow(norm(dx), alpha));
    }
  }
  return best;
}

double sup_norm_on_ball(const SolutionField& u, int grid, int threads) {
  std::vector<Vec3> pts = ball_grid(u.dimension(), grid, 1.0);
  if (const InterfaceGraph* gam = u.interface()) {
    const double R = gam->radius() * (1.0 - 1e-9);
    for (int i = 0; i <= 4 * grid; ++i) {
      const Vec2 yp{-R + 2.0 * R * i / (4 * grid), 0.0};
      const Vec3 y = gam->lift_point(yp);
      if (dot(y, y) < 1.0) pts.push_back(y);
    }
  }
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) { vals[i] = std::abs(u(pts[i])); });
  double s = 0.0;
  for (double v : vals) s = std::max(s, v);
  return s;
}

Normalized normalize(const SolutionField& u, double delta0, double alpha, LayerOptions opts, int threads) {
  if (!u.interface() || !u.density()) throw PreconditionError("normalize: u must carry its interface and density");
  if (!(delta0 > 0.0)) throw PreconditionError("normalize: delta0 must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("normalize: alpha must lie in (0, 1]");
  const InterfaceGraph& gamma = *u.interface();
  if (norm(gamma.slope({0.0, 0.0})) > 1e-12 || std::abs(gamma.height({0.0, 0.0})) > 1e-12) {
    throw PreconditionError("normalize: requires psi(0') = 0 and grad psi(0') = 0 (rotation is not implemented)");
  }
  const DensityField& g = *u.density();
  Normalized out{u, u.interface_ptr(), u.density_ptr()};
  out.g0 = g(gamma.lift_point({0.0, 0.0}));
  if (out.g0 < 0.0) throw PreconditionError(fmt::format("normalize: g(0) = {} is negative", out.g0));

  out.psi_seminorm = gradient_holder_seminorm(gamma, alpha);
  if (out.psi_seminorm > delta0) {
    out.step_psi = delta0 / out.psi_seminorm;
    auto flatter = std::make_shared<InterfaceGraph>(gamma.scaled(out.step_psi));
    out.gamma = flatter;
    out.u = single_layer_solve(flatter, out.g, opts);
  }
  if (out.g0 == 0.0) {
    out.zero_density_branch = true;
  } else if (out.g0 != 1.0) {
    out.step_g0 = 1.0 / out.g0;
  }
  out.u_sup = sup_norm_on_ball(out.u, 65, threads) * out.step_g0;
  out.g_seminorm = g.holder_at_origin(*out.gamma, alpha) * out.step_g0;
  if (out.u_sup > 1.0 || out.g_seminorm > delta0) out.step_sup = delta0 / (out.u_sup + out.g_seminorm);
  const double s = out.u_scale();
  if (s != 1.0) {
    out.u = out.u.scaled(s);
    out.g = out.u.density_ptr();
  }
  return out;
}

// ---- dyadic fits -------------------------------------------------------------------------

std::vector<double> RegularityFit::residuals() const {
  std::vector<double> r;
  for (const auto& s : scales) r.push_back(s.residual());
  return r;
}

namespace {

struct SideFit {
  LinearPolynomial poly;
  double sup = 0.0;
};

SideFit least_squares(int dim, const std::vector<Vec3>& pts, const std::vector<double>& vals, double rho) {
  const int cols = dim + 1;
  Eigen::MatrixXd M(pts.size(), cols);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    M(i, 0) = 1.0;
    M(i, 1) = pts[i][0] / rho;
    if (dim == 3) M(i, 2) = pts[i][1] / rho;
    M(i, cols - 1) = pts[i][2] / rho;
    b(i) = vals[i];
  }
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(b);
  SideFit f;
  f.poly.B = c(0);
  f.poly.A[0] = c(1) / rho;
  if (dim == 3) f.poly.A[1] = c(2) / rho;
  f.poly.A[2] = c(cols - 1) / rho;
  for (std::size_t i = 0; i < pts.size(); ++i) f.sup = std::max(f.sup, std::abs(vals[i] - f.poly(pts[i])));
  return f;
}

std::uint64_t scale_seed(std::uint64_t seed, int k) {
  return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(k) * 0xBF58476D1CE4E5B9ull;
}

void check_fit_options(const FitOptions& o) {
  if (!(o.lambda > 0.0 && o.lambda <= 0.5)) throw PreconditionError(fmt::format("lambda = {} not in (0, 1/2]", o.lambda));
  if (o.depth < 1) throw PreconditionError("fit depth must be at least 1");
  if (o.samples < 4) throw PreconditionError("at least 4 samples per side are needed");
}

}  // namespace

RegularityFit fit_polynomials(const SolutionField& u, const FitOptions& opts) {
  check_fit_options(opts);
  const InterfaceGraph* gam = u.interface();
  if (!gam) throw PreconditionError("fit_polynomials: u carries no interface");
  if (std::abs(gam->height({0.0, 0.0})) > 1e-12) throw PreconditionError("fit_polynomials: 0 must lie on Gamma");
  const int n = u.dimension();
  RegularityFit fit;
  fit.lambda = opts.lambda;
  double rho = 1.0;
  for (int k = 1; k <= opts.depth; ++k) {
    rho *= opts.lambda;
    HaltonSampler sampler(n, scale_seed(opts.seed, k));
    std::vector<Vec3> up, lo;
    const std::size_t cap = 100 * opts.samples;
    for (std::size_t draw = 0; draw < cap && (up.size() < opts.samples || lo.size() < opts.samples); ++draw) {
      const Vec3 z = rho * sampler.next_in_ball();
      const Side s = gam->side(z);
      if (s == Side::Upper && up.size() < opts.samples) up.push_back(z);
      if (s == Side::Lower && lo.size() < opts.samples) lo.push_back(z);
    }
    if (up.size() < opts.samples || lo.size() < opts.samples) {
      fit.warnings.push_back(fmt::format("scale {}: only {} upper and {} lower samples; depth truncated", k,
                                         up.size(), lo.size()));
      break;
    }
    std::vector<Vec3> all = up;
    all.insert(all.end(), lo.begin(), lo.end());
    std::vector<double> vals(all.size());
    parallel_for(all.size(), opts.threads, [&](std::size_t i) { vals[i] = u(all[i]); });
    const std::vector<double> vu(vals.begin(), vals.begin() + up.size());
    const std::vector<double> vl(vals.begin() + up.size(), vals.end());
    const SideFit fp = least_squares(n, up, vu, rho);
    const SideFit fq = least_squares(n, lo, vl, rho);
    ScaleFit sf;
    sf.k = k;
    sf.radius = rho;
    sf.P = fp.poly;
    sf.Q = fq.poly;
    sf.res_upper = fp.sup;
    sf.res_lower = fq.sup;
    sf.n_upper = up.size();
    sf.n_lower = lo.size();
    sf.tangential_mismatch = std::hypot(sf.P.A[0] - sf.Q.A[0], sf.P.A[1] - sf.Q.A[1]);
    sf.jump = sf.P.A[2] - sf.Q.A[2];
    sf.jump_error = opts.jump_target != 0.0 ? std::abs(sf.jump / opts.jump_target - 1.0) : std::abs(sf.jump);
    fit.scales.push_back(sf);
  }
  return fit;
}

RegularityFit fit_single_polynomial(const SolutionField& u, const FitOptions& opts) {
  check_fit_options(opts);
  const int n = u.dimension();
  RegularityFit fit;
  fit.lambda = opts.lambda;
  double rho = 1.0;
  for (int k = 1; k <= opts.depth; ++k) {
    rho *= opts.lambda;
    HaltonSampler sampler(n, scale_seed(opts.seed, k));
    std::vector<Vec3> pts(2 * opts.samples);
    for (auto& p : pts) p = rho * sampler.next_in_ball();
    std::vector<double> vals(pts.size());
    parallel_for(pts.size(), opts.threads, [&](std::size_t i) { vals[i] = u(pts[i]); });
    const SideFit f = least_squares(n, pts, vals, rho);
    ScaleFit sf;
    sf.k = k;
    sf.radius = rho;
    sf.P = sf.Q = f.poly;
    sf.res_upper = sf.res_lower = f.sup;
    sf.n_upper = sf.n_lower = pts.size();
    fit.scales.push_back(sf);
  }
  return fit;
}

ExponentEstimate estimate_exponent(std::span<const double> res, double lambda, double field_scale) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw PreconditionError("estimate_exponent: lambda must lie in (0, 1)");
  const double floor = 100.0 * DBL_EPSILON * std::abs(field_scale);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i] > floor && std::isfinite(res[i])) {
      xs.push_back(static_cast<double>(i + 1) * std::log(lambda));
      ys.push_back(std::log(res[i]));
    }
  }
  if (xs.size() < 4) {
    throw InsufficientDataError(
        fmt::format("estimate_exponent: {} usable scales above the floor {:.3g}, need 4", xs.size(), floor));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentEstimate e;
  e.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + e.slope * (xs[i] - mx));
    rss += r * r;
  }
  e.band = 2.0 * std::sqrt(rss / (m - 2.0) / sxx);
  e.alpha = std::clamp(e.slope - 1.0, 0.0, 1.0);
  e.saturated = e.slope - 1.0 >= 1.0;
  e.scales_used = xs.size();
  return e;
}

std::vector<double> cauchy_increments(const RegularityFit& fit) {
  std::vector<double> d;
  for (std::size_t i = 0; i + 1 < fit.scales.size(); ++i) {
    const ScaleFit& a = fit.scales[i];
    const ScaleFit& b = fit.scales[i + 1];
    const double lk = std::pow(fit.lambda, a.k);
    d.push_back(lk * norm(b.P.A - a.P.A) + lk * norm(b.Q.A - a.Q.A) +
                std::max(std::abs(b.P.B - a.P.B), std::abs(b.Q.B - a.Q.B)));
  }
  return d;
}

// ---- seminorms --------------------------------------------------------------------------

PairPlan all_pairs(std::span<const Vec3> points, double min_sep, double max_sep) {
  PairPlan plan;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = norm(points[i] - points[j]);
      if (d >= min_sep && d <= max_sep && d > 0.0) plan.pairs.emplace_back(points[i], points[j]);
    }
  }
  return plan;
}

PairPlan separation_plan(int dim, std::span<const Vec3> centres, std::span<const double> separations, int directions,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec3> dirs;
  for (int j = 0; j < directions; ++j) {
    if (dim == 2) {
      const double a = kPi * (j + uniform01(rng)) / directions;
      dirs.push_back(make_point(std::cos(a), 0.0, std::sin(a)));
    } else {
      const double zc = 2.0 * uniform01(rng) - 1.0;
      const double ph = 2.0 * kPi * uniform01(rng);
      const double s = std::sqrt(1.0 - zc * zc);
      dirs.push_back(make_point(s * std::cos(ph), s * std::sin(ph), zc));
    }
  }
  PairPlan plan;
  for (const Vec3& c : centres) {
    for (double s : separations) {
      for (const Vec3& e : dirs) plan.pairs.emplace_back(c - (0.5 * s) * e, c + (0.5 * s) * e);
    }
  }
  return plan;
}

double seminorm(const std::function<double(const Vec3&)>& f, SeminormMode mode, const PairPlan& plan, double beta,
                int threads) {
  if (plan.pairs.empty()) throw InsufficientDataError("seminorm: empty pair plan");
  if (mode == SeminormMode::Holder && !(beta > 0.0 && beta <= 1.0)) {
    throw PreconditionError(fmt::format("seminorm: Hoelder exponent {} not in (0, 1]", beta));
  }
  std::vector<double> q(plan.pairs.size(), 0.0);
  parallel_for(plan.pairs.size(), threads, [&](std::size_t i) {
    const auto& [x, y] = plan.pairs[i];
    const double d = norm(x - y);
    if (!(d > 0.0)) return;
    const double diff = std::abs(f(x) - f(y));
    if (mode == SeminormMode::Holder) {
      q[i] = diff / std::pow(d, beta);
    } else {
      const double l = std::abs(std::log(d));
      if (l > 1e-12) q[i] = diff / (d * l);
    }
  });
  return *std::max_element(q.begin(), q.end());
}

// ---- Campanato assembly --------------------------------------------------------------------

CampanatoEstimate campanato_assemble(const SolutionField& u, Side side, const RegularityFit& boundary, double alpha,
                                     int mesh, int threads) {
  if (boundary.scales.empty()) throw PreconditionError("campanato_assemble: no boundary fits");
  if (side != Side::Upper && side != Side::Lower) throw PreconditionError("campanato_assemble: side must be upper or lower");
  const int n = u.dimension();
  const InterfaceGraph* gam = u.interface();
  double lip = 0.0;
  if (gam) {
    const FlatnessReport fh = flatness_horizontality(*gam);
    lip = std::sqrt(std::max(0.0, 1.0 / (fh.horizontality * fh.horizontality) - 1.0));
  }
  const double p = 1.0 + alpha;
  std::vector<Vec3> pts;
  for (const Vec3& x : ball_grid(n, mesh, 0.5)) {
    const Side s = gam ? gam->side(x) : Side::Upper;
    if (s == side) pts.push_back(x);
  }
  std::vector<double> ratio(pts.size(), 0.0), mag(pts.size(), 0.0);
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    const Vec3& x = pts[i];
    double d = gam ? std::abs(gam->vertical_offset(x)) / std::sqrt(1.0 + lip * lip) : INFINITY;
    d = std::min(d, 1.0 - norm(x));
    if (!(d > 1e-9)) return;
    const double ux = u(x);
    const Vec3 gx = u.gradient(x).gradient;
    mag[i] = std::abs(gx[0]) + std::abs(gx[1]) + std::abs(gx[2]) + std::abs(ux - dot(gx, x));
    for (double frac : {0.5, 0.25}) {
      for (int c = 0; c < 3; ++c) {
        if (n == 2 && c == 1) continue;
        for (double sg : {-1.0, 1.0}) {
          Vec3 z = x;
          z[c] += sg * frac * d;
          const double r = frac * d;
          ratio[i] = std::max(ratio[i], std::abs(u(z) - ux - dot(gx, z - x)) / std::pow(r, p));
        }
      }
    }
  });
  CampanatoEstimate est;
  est.interior_points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    est.interior_c_star = std::max(est.interior_c_star, ratio[i]);
    est.coefficient_sup = std::max(est.coefficient_sup, mag[i]);
  }
  for (const ScaleFit& s : boundary.scales) {
    const bool up = side == Side::Upper;
    const double res = up ? s.res_upper : s.res_lower;
    est.boundary_c_star = std::max(est.boundary_c_star, res / std::pow(s.radius, p));
    est.coefficient_sup = std::max(est.coefficient_sup, (up ? s.P : s.Q).magnitude());
  }
  est.boundary_fits = boundary.scales.size();
  est.c_star = std::max(est.interior_c_star, est.boundary_c_star);
  return est;
}

}  // namespace translab
