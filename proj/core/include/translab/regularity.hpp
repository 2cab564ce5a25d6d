#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "translab/potential.hpp"

namespace translab {

/// P(x) = A . x + B.
struct LinearPolynomial {
  Vec3 A{0.0, 0.0, 0.0};
  double B = 0.0;

  double operator()(const Vec3& x) const { return dot(A, x) + B; }
  /// sum_i |A_i| + |B|
  double magnitude() const { return std::abs(A[0]) + std::abs(A[1]) + std::abs(A[2]) + std::abs(B); }
};

// ---- normalization ------------------------------------------------------------------

/// sup over sampled pairs of |grad psi(x') - grad psi(y')| / |x' - y'|^alpha.
double gradient_holder_seminorm(const InterfaceGraph& gamma, double alpha, int resolution = 256);

/// sup |u| over a lattice of B_1 plus samples on the interface.
double sup_norm_on_ball(const SolutionField& u, int grid = 65, int threads = 1);

struct Normalized {
  SolutionField u;
  std::shared_ptr<const InterfaceGraph> gamma;
  std::shared_ptr<const DensityField> g;
  double g0 = 1.0;        // g(0) of the input density
  double step_g0 = 1.0;   // u -> u / g(0)
  double step_sup = 1.0;  // u -> delta0 u / (|u|_inf + [g]_alpha(0))
  double step_psi = 1.0;  // psi -> delta0 psi / [grad psi]_alpha
  double u_sup = 0.0;
  double g_seminorm = 0.0;
  double psi_seminorm = 0.0;
  /// g(0) = 0: the single-polynomial comparison applies instead of the split fits.
  bool zero_density_branch = false;

  double u_scale() const { return step_g0 * step_sup; }
  /// g(0) after normalization; slope jumps are measured against it.
  double jump_target() const { return g0 * u_scale(); }
};

/// Rescales (u, g, psi) so that g(0) = 1, |u| <= 1, [g]_alpha(0) <= delta0 and
/// [grad psi]_alpha <= delta0. A step whose bound already holds is skipped.
/// Rescaling psi re-solves u as the zero-trace single layer of the new graph.
/// Throws PreconditionError when grad psi(0) != 0 or g(0) < 0.
Normalized normalize(const SolutionField& u, double delta0, double alpha, LayerOptions opts = {}, int threads = 1);

// ---- dyadic fits -------------------------------------------------------------------------

struct ScaleFit {
  int k = 0;
  double radius = 0.0;
  LinearPolynomial P;  // upper side
  LinearPolynomial Q;  // lower side
  double res_upper = 0.0;
  double res_lower = 0.0;
  std::size_t n_upper = 0;
  std::size_t n_lower = 0;
  double tangential_mismatch = 0.0;  // |grad' P - grad' Q|
  double jump = 0.0;                 // P_n - Q_n
  double jump_error = 0.0;           // |jump / target - 1|, or |jump| when target = 0

  double residual() const { return std::max(res_upper, res_lower); }
};

struct FitOptions {
  double lambda = 0.5;
  int depth = 8;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Expected slope jump (normalized g(0)).
  double jump_target = 1.0;
};

struct RegularityFit {
  double lambda = 0.5;
  std::vector<ScaleFit> scales;
  std::vector<std::string> warnings;

  std::vector<double> residuals() const;
};

/// Least-squares linear fits of u on each side of its interface inside
/// B_{lambda^k}, k = 1..depth, from quasi-random samples. Scales where a side
/// gets fewer than the requested samples end the fit with a warning.
RegularityFit fit_polynomials(const SolutionField& u, const FitOptions& opts);

/// One linear fit per scale with no side split (the g(0) = 0 branch).
RegularityFit fit_single_polynomial(const SolutionField& u, const FitOptions& opts);

struct ExponentEstimate {
  double alpha = 0.0;      // clamped to [0, 1]
  double slope = 0.0;      // raw decay rate s with res_k ~ lambda^{k s}
  double band = 0.0;       // two standard errors of the slope
  bool saturated = false;  // s - 1 >= 1
  std::size_t scales_used = 0;
};

/// Regression of log res_k on k log lambda over scales above the floor
/// res_k > 100 eps field_scale. Throws InsufficientDataError below 4 scales.
ExponentEstimate estimate_exponent(std::span<const double> res, double lambda, double field_scale = 1.0);

/// D_k = lambda^k |A_{k+1} - A_k| + lambda^k |C_{k+1} - C_k| + max of the two
/// constant-term differences, for consecutive fitted scales.
std::vector<double> cauchy_increments(const RegularityFit& fit);

// ---- seminorms --------------------------------------------------------------------------

enum class SeminormMode { Holder, LogLip };

struct PairPlan {
  std::vector<std::pair<Vec3, Vec3>> pairs;
};

/// All pairs of the points whose separation lies in [min_sep, max_sep].
PairPlan all_pairs(std::span<const Vec3> points, double min_sep = 0.0, double max_sep = INFINITY);

/// Pairs x +- s e/2 around each centre for every separation s and a fixed set
/// of directions derived from the seed.
PairPlan separation_plan(int dim, std::span<const Vec3> centres, std::span<const double> separations, int directions,
                         std::uint64_t seed);

/// Max over the plan of |f(x) - f(y)| / |x - y|^beta (Holder) or
/// |f(x) - f(y)| / (|x - y| |log |x - y||) (LogLip): a lower bound for the
/// seminorm. Throws InsufficientDataError for an empty plan.
double seminorm(const std::function<double(const Vec3&)>& f, SeminormMode mode, const PairPlan& plan,
                double beta = 1.0, int threads = 1);

// ---- Campanato assembly --------------------------------------------------------------------

struct CampanatoEstimate {
  double c_star = 0.0;           // max |u(z) - Q_x(z)| / |z - x|^{1 + alpha}
  double coefficient_sup = 0.0;  // max sum |A_i| + |B|
  double interior_c_star = 0.0;
  double boundary_c_star = 0.0;
  std::size_t interior_points = 0;
  std::size_t boundary_fits = 0;

  double norm() const { return c_star + coefficient_sup; }
};

/// Combines first-order Taylor polynomials at interior mesh points of
/// side cap B_{1/2} (checked on B_{d_x/2}(x)) with the boundary fits at the
/// origin. Throws PreconditionError when the fit carries no scales.
CampanatoEstimate campanato_assemble(const SolutionField& u, Side side, const RegularityFit& boundary, double alpha,
                                     int mesh = 16, int threads = 1);

// ---- sampling ---------------------------------------------------------------------------

/// Deterministic Halton sequence in [0,1)^dim with a seeded Cranley-Patterson shift.
class HaltonSampler {
 public:
  HaltonSampler(int dim, std::uint64_t seed);
  /// Next point of the unit ball B_1 (rejection from the cube).
  Vec3 next_in_ball();

 private:
  int dim_;
  std::uint64_t index_ = 1;
  double shift_[3]{};
};

}  // namespace translab
