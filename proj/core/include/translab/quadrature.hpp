#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace translab {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached Gauss-Legendre rule; safe to call concurrently.
const GaussRule& gauss_legendre(int n);

/// A quadrature value together with its error estimate.
struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    evaluations += o.evaluations;
    return *this;
  }
};

struct AdaptiveOptions {
  /// A panel is accepted once bisecting it changes its contribution by less than this.
  double panel_tol = 1e-13;
  int max_depth = 52;
  int panel_order = 8;
  /// Past this many bisections per call, remaining panels are accepted as they are.
  std::size_t max_splits = 20000;
};

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double gauss_fixed(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

/// Adaptive bisection over the panels delimited by consecutive breakpoints.
/// Panels are processed strictly left to right, so the summation order (and
/// therefore the result) does not depend on the caller's thread.
template <class F>
QuadResult integrate_adaptive(F&& f, std::span<const double> breaks, const AdaptiveOptions& opt = {}) {
  const GaussRule& rule = gauss_legendre(opt.panel_order);
  QuadResult out;
  struct Panel {
    double a, b, coarse;
    int depth;
  };
  std::vector<Panel> stack;
  std::size_t splits = 0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a0 = breaks[p];
    const double b0 = breaks[p + 1];
    if (!(b0 > a0)) continue;
    stack.clear();
    stack.push_back({a0, b0, gauss_fixed(f, a0, b0, rule), 0});
    out.evaluations += rule.nodes.size();
    while (!stack.empty()) {
      Panel pan = stack.back();
      stack.pop_back();
      const double m = 0.5 * (pan.a + pan.b);
      const double left = gauss_fixed(f, pan.a, m, rule);
      const double right = gauss_fixed(f, m, pan.b, rule);
      out.evaluations += 2 * rule.nodes.size();
      const double diff = std::abs(left + right - pan.coarse);
      if (diff <= opt.panel_tol || pan.depth >= opt.max_depth || splits >= opt.max_splits ||
          !(m > pan.a && m < pan.b)) {
        out.value += left + right;
        out.error += diff;
        continue;
      }
      ++splits;
      stack.push_back({m, pan.b, right, pan.depth + 1});
      stack.push_back({pan.a, m, left, pan.depth + 1});
    }
  }
  return out;
}

/// Breakpoints for [a, b] split into panels no wider than `max_width`, plus
/// any extra interior points (e.g. the projection of a near-singular target).
std::vector<double> make_breakpoints(double a, double b, double max_width,
                                     std::span<const double> extra = {});

}  // namespace translab
