#include "translab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <yaml-cpp/yaml.h>

#include "translab/averaging.hpp"
#include "translab/flat.hpp"
#include "translab/parallel.hpp"
#include "translab/regularity.hpp"
#include "translab/stability.hpp"

namespace translab {

const char* version() { return "0.1.0"; }

// ---- configuration ---------------------------------------------------------------------

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("'{}' must be a mapping", where));
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError(fmt::format("unknown key '{}{}'", where.empty() ? "" : where + ".", key));
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& dst, const std::string& where) {
  if (!node[key]) return;
  try {
    dst = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("'{}{}' has the wrong type", where.empty() ? "" : where + ".", key));
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("malformed YAML: {}", e.what()));
  }
  if (!root || !root.IsMap()) throw ConfigError("configuration must be a YAML mapping");
  check_keys(root, "", {"command", "dimension", "seed", "threads", "interface", "density", "quadrature", "grid",
                        "ladder", "flat", "sweep", "regularity", "verify", "output"});
  ExperimentConfig c;
  read(root, "command", c.command, "");
  read(root, "dimension", c.dimension, "");
  read(root, "seed", c.seed, "");
  read(root, "threads", c.threads, "");
  read(root, "output", c.output, "");
  if (auto n = root["interface"]) {
    check_keys(n, "interface", {"family", "params"});
    read(n, "family", c.family, "interface");
    if (auto p = n["params"]) {
      if (!p.IsMap()) throw ConfigError("'interface.params' must be a mapping");
      for (const auto& kv : p) {
        try {
          c.family_params[kv.first.as<std::string>()] = kv.second.as<double>();
        } catch (const YAML::Exception&) {
          throw ConfigError(fmt::format("'interface.params.{}' must be a number", kv.first.as<std::string>()));
        }
      }
    }
  }
  if (auto n = root["density"]) {
    check_keys(n, "density", {"family", "value", "base", "amp", "beta"});
    read(n, "family", c.density, "density");
    read(n, "value", c.density_value, "density");
    read(n, "base", c.density_base, "density");
    read(n, "amp", c.density_amp, "density");
    read(n, "beta", c.density_beta, "density");
  }
  if (auto n = root["quadrature"]) {
    check_keys(n, "quadrature", {"surface_order", "volume_order", "tolerance"});
    read(n, "surface_order", c.surface_order, "quadrature");
    read(n, "volume_order", c.volume_order, "quadrature");
    read(n, "tolerance", c.panel_tolerance, "quadrature");
  }
  if (auto n = root["grid"]) {
    check_keys(n, "grid", {"size"});
    read(n, "size", c.grid, "grid");
  }
  if (auto n = root["ladder"]) {
    check_keys(n, "ladder", {"t0", "rungs"});
    read(n, "t0", c.ladder_t0, "ladder");
    read(n, "rungs", c.ladder_rungs, "ladder");
  }
  if (auto n = root["flat"]) {
    check_keys(n, "flat", {"c0", "a", "r", "lines", "samples"});
    read(n, "c0", c.flat_c0, "flat");
    read(n, "a", c.flat_a, "flat");
    read(n, "r", c.flat_r, "flat");
    read(n, "lines", c.flat_lines, "flat");
    read(n, "samples", c.flat_samples, "flat");
  }
  if (auto n = root["sweep"]) {
    check_keys(n, "sweep", {"eps", "gamma", "grid", "barriers", "barrier_grid"});
    read(n, "eps", c.sweep_eps, "sweep");
    read(n, "gamma", c.sweep_gamma, "sweep");
    read(n, "grid", c.sweep_grid, "sweep");
    read(n, "barriers", c.sweep_barriers, "sweep");
    read(n, "barrier_grid", c.sweep_barrier_grid, "sweep");
  }
  if (auto n = root["regularity"]) {
    check_keys(n, "regularity", {"lambda", "depth", "samples", "delta0", "alpha", "campanato_mesh"});
    read(n, "lambda", c.lambda, "regularity");
    read(n, "depth", c.depth, "regularity");
    read(n, "samples", c.samples, "regularity");
    read(n, "delta0", c.delta0, "regularity");
    read(n, "alpha", c.alpha, "regularity");
    read(n, "campanato_mesh", c.campanato_mesh, "regularity");
  }
  if (auto n = root["verify"]) {
    check_keys(n, "verify", {"eps", "points", "h", "average_order"});
    read(n, "eps", c.verify_eps, "verify");
    read(n, "points", c.verify_points, "verify");
    read(n, "h", c.verify_h, "verify");
    read(n, "average_order", c.verify_average_order, "verify");
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_yaml(ss.str());
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> commands{"solve", "flat", "stability-sweep", "regularity-fit", "verify"};
  if (!commands.count(command)) throw ConfigError(fmt::format("unknown command '{}'", command));
  if (dimension != 2 && dimension != 3) throw ConfigError(fmt::format("dimension must be 2 or 3, got {}", dimension));
  if (threads < 1) throw ConfigError("threads must be at least 1");
  try {
    (void)make_test_interface(dimension, family, family_params);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("interface: {}", e.what()));
  }
  if (density != "constant" && density != "holder") throw ConfigError(fmt::format("unknown density family '{}'", density));
  if (density == "holder" && !(density_beta > 0.0 && density_beta <= 1.0)) {
    throw ConfigError("density.beta must lie in (0, 1]");
  }
  if (surface_order < 2 || volume_order < 2) throw ConfigError("quadrature orders must be at least 2");
  if (!(panel_tolerance > 0.0)) throw ConfigError("quadrature.tolerance must be positive");
  if (grid < 2) throw ConfigError("grid.size must be at least 2");
  if (!(ladder_t0 > 0.0) || ladder_rungs < 2) throw ConfigError("ladder needs t0 > 0 and at least 2 rungs");
  if (command == "flat") {
    if (!(flat_r > 0.0)) throw ConfigError("flat.r must be positive");
    if (!(std::abs(flat_a) < flat_r)) throw ConfigError(fmt::format("flat.a: |a| = {} must be below r = {}", std::abs(flat_a), flat_r));
    if (flat_samples < 2) throw ConfigError("flat.samples must be at least 2");
    for (double x : flat_lines) {
      if (!(std::abs(x) < 0.8 * flat_r)) throw ConfigError(fmt::format("flat.lines: {} is within 0.2 r of the rim", x));
      if (!(ladder_t0 * flat_r < std::sqrt(flat_r * flat_r - x * x))) throw ConfigError("flat.lines: ladder leaves the ball");
    }
  }
  if (command == "stability-sweep") {
    if (sweep_eps.empty()) throw ConfigError("sweep.eps must not be empty");
    for (double e : sweep_eps) {
      if (!(e > 0.0 && e < 0.5)) throw ConfigError(fmt::format("sweep.eps entry {} not in (0, 1/2)", e));
      if (!(e * e < 0.25)) throw ConfigError("sweep.eps: companion level must stay below 1/4");
    }
    if (!(sweep_gamma > 0.0 && sweep_gamma < 1.0)) throw ConfigError("sweep.gamma must lie in (0, 1)");
    if (sweep_grid < 64) throw ConfigError("sweep.grid must be at least 64 per axis");
    if (sweep_barrier_grid < 2) throw ConfigError("sweep.barrier_grid must be at least 2");
  }
  if (command == "regularity-fit") {
    if (!(lambda > 0.0 && lambda <= 0.5)) throw ConfigError("regularity.lambda must lie in (0, 1/2]");
    if (depth < 4) throw ConfigError("regularity.depth must be at least 4");
    if (samples < 4) throw ConfigError("regularity.samples must be at least 4");
    if (!(delta0 > 0.0)) throw ConfigError("regularity.delta0 must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("regularity.alpha must lie in (0, 1]");
    if (campanato_mesh < 2) throw ConfigError("regularity.campanato_mesh must be at least 2");
    const double floor_len = 1e-6;
    if (std::pow(lambda, depth) < 10.0 * floor_len) throw ConfigError("regularity.depth exceeds the resolvable range");
    const InterfaceGraph gam = make_test_interface(dimension, family, family_params);
    if (norm(gam.slope({0.0, 0.0})) > 1e-12 || std::abs(gam.height({0.0, 0.0})) > 1e-12) {
      throw ConfigError("regularity-fit needs psi(0) = 0 and grad psi(0) = 0");
    }
    const double g0 = density == "constant" ? density_value : density_base;
    if (g0 < 0.0 || (density == "holder" && density_base - std::abs(density_amp) < 0.0)) {
      throw ConfigError("regularity-fit needs a nonnegative density");
    }
  }
  if (command == "verify") {
    if (!(verify_eps > 0.0 && verify_eps < 0.25)) throw ConfigError("verify.eps must lie in (0, 1/4)");
    if (verify_points < 1) throw ConfigError("verify.points must be positive");
    if (!(verify_h > 0.0 && verify_h <= verify_eps / 4.0)) throw ConfigError("verify.h must lie in (0, eps/4]");
    if (verify_average_order < 2) throw ConfigError("verify.average_order must be at least 2");
  }
}

double ExperimentReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m.value;
  }
  throw DomainError(fmt::format("report has no metric '{}'", name));
}

// ---- output helpers -----------------------------------------------------------------------

namespace {

using nlohmann::json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw EvaluationError(fmt::format("cannot write '{}'", path.string()));
    row_strings(header);
    rows_ = 0;
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(num(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    ++rows_;
  }
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t rows_ = 0;
};

json config_echo(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["dimension"] = c.dimension;
  j["seed"] = c.seed;
  j["interface"] = {{"family", c.family}, {"params", c.family_params}};
  if (c.density == "constant") {
    j["density"] = {{"family", "constant"}, {"value", c.density_value}};
  } else {
    j["density"] = {{"family", "holder"}, {"base", c.density_base}, {"amp", c.density_amp}, {"beta", c.density_beta}};
  }
  j["quadrature"] = {{"surface_order", c.surface_order}, {"volume_order", c.volume_order}, {"tolerance", c.panel_tolerance}};
  j["grid"] = {{"size", c.grid}};
  j["ladder"] = {{"t0", c.ladder_t0}, {"rungs", c.ladder_rungs}};
  if (c.command == "flat") {
    j["flat"] = {{"c0", c.flat_c0}, {"a", c.flat_a}, {"r", c.flat_r}, {"lines", c.flat_lines}, {"samples", c.flat_samples}};
  }
  if (c.command == "stability-sweep") {
    j["sweep"] = {{"eps", c.sweep_eps}, {"gamma", c.sweep_gamma}, {"grid", c.sweep_grid}, {"barriers", c.sweep_barriers},
                  {"barrier_grid", c.sweep_barrier_grid}};
  }
  if (c.command == "regularity-fit") {
    j["regularity"] = {{"lambda", c.lambda}, {"depth", c.depth}, {"samples", c.samples}, {"delta0", c.delta0},
                       {"alpha", c.alpha}, {"campanato_mesh", c.campanato_mesh}};
  }
  if (c.command == "verify") {
    j["verify"] = {{"eps", c.verify_eps}, {"points", c.verify_points}, {"h", c.verify_h},
                   {"average_order", c.verify_average_order}};
  }
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw EvaluationError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  ExperimentReport rep;
  json extra = json::object();

  void metric(const std::string& name, double value, const std::string& op) { rep.metrics.push_back({name, value, op}); }
  void table(const std::string& name, const std::string& file, std::size_t rows) { rep.tables.push_back({name, file, rows}); }
};

std::shared_ptr<InterfaceGraph> build_interface(const ExperimentConfig& c) {
  return std::make_shared<InterfaceGraph>(make_test_interface(c.dimension, c.family, c.family_params));
}

std::shared_ptr<DensityField> build_density(const ExperimentConfig& c) {
  if (c.density == "constant") return std::make_shared<DensityField>(DensityField::constant(c.density_value));
  return std::make_shared<DensityField>(DensityField::holder(c.density_base, c.density_amp, c.density_beta));
}

LayerOptions layer_options(const ExperimentConfig& c) {
  LayerOptions o;
  o.panel_tol = c.panel_tolerance;
  return o;
}

std::vector<TestFunction> standard_bumps(const InterfaceGraph& gamma) {
  std::vector<TestFunction> out;
  for (double t : {0.0, 0.3, -0.25}) {
    const Vec3 c = gamma.lift_point({t, 0.0});
    out.push_back({c, 0.25, gamma.dimension()});
  }
  return out;
}

// ---- commands -------------------------------------------------------------------------------

void run_solve(Context& ctx) {
  const auto& c = ctx.cfg;
  auto gamma = build_interface(c);
  auto g = build_density(c);
  const SolutionField u = single_layer_solve(gamma, g, layer_options(c));
  // n = 3 is sampled on the plane x_2 = 0.
  std::vector<Vec3> pts;
  const double h = 2.0 / (c.grid - 1);
  for (int i = 0; i < c.grid; ++i) {
    for (int k = 0; k < c.grid; ++k) {
      const Vec3 p = make_point(-1.0 + i * h, 0.0, -1.0 + k * h);
      if (norm(p) < 1.0) pts.push_back(p);
    }
  }
  std::vector<EvalResult> vals(pts.size());
  parallel_for(pts.size(), c.threads, [&](std::size_t i) { vals[i] = u.value(pts[i]); });
  CsvWriter csv(ctx.dir / "solution.csv", {"x1", "x2", "xn", "side", "u", "error"});
  double umax = -INFINITY, umin = INFINITY, emax = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int side = gamma->side(pts[i]) == Side::Upper ? 1 : gamma->side(pts[i]) == Side::Lower ? -1 : 0;
    csv.row({pts[i][0], pts[i][1], pts[i][2], static_cast<double>(side), vals[i].value, vals[i].error});
    umax = std::max(umax, vals[i].value);
    umin = std::min(umin, vals[i].value);
    emax = std::max(emax, vals[i].error);
  }
  ctx.table("solution", "solution.csv", csv.rows() - 1);
  ctx.metric("u_max", umax, "single_layer_solve+evaluate");
  ctx.metric("u_min", umin, "single_layer_solve+evaluate");
  ctx.metric("quadrature_error_max", emax, "single_layer_solve+evaluate");
  double trace = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double th = 2.0 * kPi * (j + 0.5) / 64;
    trace = std::max(trace, std::abs(u(make_point(std::cos(th), 0.0, std::sin(th)))));
  }
  ctx.metric("boundary_trace_max", trace, "single_layer_solve+evaluate(sphere)");
  if (c.dimension == 2) {
    const auto bumps = standard_bumps(*gamma);
    for (std::size_t b = 0; b < bumps.size(); ++b) {
      const auto d = verify_distributional(u, *gamma, *g, bumps[b], c.volume_order, c.surface_order);
      ctx.metric(fmt::format("distributional.bump{}.residual", b), d.residual, "verify_distributional");
    }
  } else {
    ctx.rep.warnings.push_back("distributional residuals are reported by 'verify' for n = 3");
  }
  ctx.rep.summary.push_back(fmt::format("u in [{:.6g}, {:.6g}], boundary trace {:.3g}", umin, umax, trace));
}

void run_flat(Context& ctx) {
  const auto& c = ctx.cfg;
  FlatSlab slab{c.flat_r, c.flat_a, c.dimension};
  slab.validate();
  const DensityField g = c.density == "holder" ? DensityField::holder(c.density_base, c.density_amp, c.density_beta)
                                                : DensityField::constant(c.flat_c0);
  const SolutionField v = flat_solve(slab, g, {}, layer_options(c));
  struct Row {
    double x1, xn, v, dv;
  };
  std::vector<Vec3> pts;
  for (double x1 : c.flat_lines) {
    const double half = std::sqrt(slab.r * slab.r - x1 * x1);
    for (int j = 0; j < c.flat_samples; ++j) {
      const double s = -0.95 * half + 1.9 * half * j / (c.flat_samples - 1);
      pts.push_back(make_point(x1, 0.0, slab.a + s));
    }
  }
  std::vector<Row> rows(pts.size());
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    rows[i] = {pts[i][0], pts[i][2], v(pts[i]), v.gradient(pts[i]).gradient[2]};
  });
  CsvWriter prof(ctx.dir / "profile.csv", {"x1", "xn", "v", "dv_dxn"});
  for (const Row& r : rows) prof.row({r.x1, r.xn, r.v, r.dv});
  ctx.table("profile", "profile.csv", prof.rows() - 1);

  const LadderOptions ladder{c.ladder_t0 * slab.r, c.ladder_rungs};
  std::vector<std::array<double, 8>> jumps(c.flat_lines.size());
  parallel_for(c.flat_lines.size(), c.threads, [&](std::size_t i) {
    const Vec3 x = make_point(c.flat_lines[i], 0.0, slab.a);
    const auto up = one_sided_derivative(v, x, +1, ladder);
    const auto lo = one_sided_derivative(v, x, -1, ladder);
    const double jump = up.value[2] - lo.value[2];
    const double gx = g(x);
    jumps[i] = {c.flat_lines[i], up.value[2], lo.value[2], jump, gx, std::abs(jump - gx),
                std::hypot(up.value[0] - lo.value[0], up.value[1] - lo.value[1]),
                (up.converged && lo.converged) ? std::max(up.error, lo.error) : -1.0};
  });
  CsvWriter jc(ctx.dir / "jumps.csv",
               {"x1", "upper_dn", "lower_dn", "jump", "g", "jump_error", "tangential_mismatch", "extrapolation_error"});
  double worst = 0.0, tang = 0.0;
  for (const auto& r : jumps) {
    jc.row(std::vector<double>(r.begin(), r.end()));
    worst = std::max(worst, r[5]);
    tang = std::max(tang, r[6]);
    if (r[7] < 0.0) ctx.rep.warnings.push_back(fmt::format("extrapolation ladder at x1 = {} did not converge", r[0]));
  }
  ctx.table("jumps", "jumps.csv", jc.rows() - 1);
  ctx.metric("jump_error_max", worst, "one_sided_derivative");
  ctx.metric("tangential_mismatch_max", tang, "one_sided_derivative");
  if (slab.a == 0.0) {
    const auto grid = symmetric_grid(slab, std::min(c.grid, 64));
    const double asym = reflection_check(v, grid, 0.0, c.threads);
    ctx.metric("reflection_asymmetry", asym, "reflection_check");
  }
  ctx.rep.summary.push_back(fmt::format("max |jump - g| = {:.3e}", worst));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

void run_sweep(Context& ctx) {
  const auto& c = ctx.cfg;
  std::vector<StabilityReport> reps(c.sweep_eps.size());
  StabilityRunOptions opts;
  opts.grid = c.sweep_grid;
  opts.barriers = c.sweep_barriers;
  opts.barrier_grid = c.sweep_barrier_grid;
  parallel_for(c.sweep_eps.size(), c.threads, [&](std::size_t i) {
    const double e = c.sweep_eps[i];
    reps[i] = run_stability_point(c.dimension, StabilityParams{e, e, e, c.sweep_gamma}, opts);
  });
  CsvWriter csv(ctx.dir / "stability.csv", {"theta", "delta", "eps", "gamma", "flatness", "horizontality", "gap", "eta",
                                            "barrier_low", "barrier_high"});
  std::vector<double> eps, gaps;
  json rows = json::array();
  for (const auto& r : reps) {
    csv.row({r.params.theta, r.params.delta, r.params.eps, r.params.gamma, r.flatness, r.horizontality, r.gap, r.eta,
             r.barrier_low, r.barrier_high});
    eps.push_back(r.params.eps);
    gaps.push_back(r.gap);
    rows.push_back({{"eps", r.params.eps}, {"density_low", r.density_low}, {"density_high", r.density_high},
                    {"quadrature_error", r.quadrature_error}, {"grid_points", r.grid_points}});
  }
  ctx.extra["sweep_points"] = rows;
  ctx.table("stability", "stability.csv", csv.rows() - 1);
  if (reps.size() >= 2) {
    std::vector<std::size_t> order(reps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) decreasing = decreasing && gaps[order[i + 1]] < gaps[order[i]];
    ctx.metric("gap_strictly_decreasing", decreasing ? 1.0 : 0.0, "run_stability_point");
    const double slope = loglog_slope(eps, gaps);
    ctx.metric("gap_loglog_slope", slope, "run_stability_point");
    ctx.rep.summary.push_back(fmt::format("gap slope {:.4f}, strictly decreasing: {}", slope, decreasing));
  }
}

void run_regularity(Context& ctx) {
  const auto& c = ctx.cfg;
  auto gamma = build_interface(c);
  auto g = build_density(c);
  const SolutionField u = single_layer_solve(gamma, g, layer_options(c));
  const Normalized nz = normalize(u, c.delta0, c.alpha, layer_options(c), c.threads);
  ctx.extra["normalization"] = {{"g0", nz.g0},
                                {"step_g0", nz.step_g0},
                                {"step_sup", nz.step_sup},
                                {"step_psi", nz.step_psi},
                                {"u_sup", nz.u_sup},
                                {"g_seminorm", nz.g_seminorm},
                                {"psi_seminorm", nz.psi_seminorm},
                                {"zero_density_branch", nz.zero_density_branch}};
  FitOptions fo;
  fo.lambda = c.lambda;
  fo.depth = c.depth;
  fo.samples = static_cast<std::size_t>(c.samples);
  fo.seed = c.seed;
  fo.threads = c.threads;
  fo.jump_target = nz.jump_target();
  const RegularityFit fit = nz.zero_density_branch ? fit_single_polynomial(nz.u, fo) : fit_polynomials(nz.u, fo);
  for (const auto& w : fit.warnings) ctx.rep.warnings.push_back(w);

  const int n = c.dimension;
  std::vector<std::string> header{"k", "res1", "res2"};
  for (int i = 1; i <= n; ++i) header.push_back(fmt::format("a{}", i));
  header.push_back("b");
  for (int i = 1; i <= n; ++i) header.push_back(fmt::format("c{}", i));
  header.push_back("tangential_mismatch");
  header.push_back("jump_error");
  CsvWriter csv(ctx.dir / "regularity.csv", header);
  json consts = json::array();
  double jump_worst = 0.0, tang_worst = 0.0;
  for (const auto& s : fit.scales) {
    std::vector<double> row{static_cast<double>(s.k), s.res_upper, s.res_lower};
    auto comps = [&](const Vec3& a) {
      row.push_back(a[0]);
      if (n == 3) row.push_back(a[1]);
      row.push_back(a[2]);
    };
    comps(s.P.A);
    row.push_back(s.P.B);
    comps(s.Q.A);
    row.push_back(s.tangential_mismatch);
    row.push_back(s.jump_error);
    csv.row(row);
    consts.push_back({{"k", s.k}, {"b_upper", s.P.B}, {"b_lower", s.Q.B}, {"n_upper", s.n_upper}, {"n_lower", s.n_lower}});
    jump_worst = std::max(jump_worst, s.jump_error);
    tang_worst = std::max(tang_worst, s.tangential_mismatch);
  }
  ctx.extra["constants"] = consts;
  ctx.table("regularity", "regularity.csv", csv.rows() - 1);
  if (!nz.zero_density_branch) {
    ctx.metric("jump_error_max", jump_worst, "fit_polynomials");
    ctx.metric("tangential_mismatch_max", tang_worst, "fit_polynomials");
  }
  const ExponentEstimate est = estimate_exponent(fit.residuals(), c.lambda, std::max(nz.u_sup * nz.u_scale(), 1e-300));
  ctx.metric("alpha_hat", est.alpha, "estimate_exponent");
  ctx.metric("alpha_band", est.band, "estimate_exponent");
  ctx.metric("decay_slope", est.slope, "estimate_exponent");
  ctx.metric("scales_used", static_cast<double>(est.scales_used), "estimate_exponent");

  const auto inc = cauchy_increments(fit);
  double cfit = 0.0;
  json incs = json::array();
  for (std::size_t i = 0; i < inc.size(); ++i) {
    const double r = inc[i] / std::pow(c.lambda, fit.scales[i].k * (1.0 + est.alpha));
    cfit = std::max(cfit, r);
    incs.push_back({{"k", fit.scales[i].k}, {"increment", inc[i]}, {"ratio", r}});
  }
  ctx.extra["cauchy"] = incs;
  ctx.metric("cauchy_constant", cfit, "cauchy_increments");

  if (!nz.zero_density_branch) {
    for (Side side : {Side::Upper, Side::Lower}) {
      const auto ce = campanato_assemble(nz.u, side, fit, est.alpha, c.campanato_mesh, c.threads);
      const std::string tag = side == Side::Upper ? "upper" : "lower";
      ctx.metric("campanato." + tag + ".c_star", ce.c_star, "campanato_assemble");
      ctx.metric("campanato." + tag + ".coefficient_sup", ce.coefficient_sup, "campanato_assemble");
    }
  }
  ctx.rep.summary.push_back(fmt::format("alpha_hat = {:.4f} +/- {:.4f} (decay slope {:.4f}, {} scales{})", est.alpha,
                                        est.band, est.slope, est.scales_used, est.saturated ? ", saturated" : ""));
}

void run_verify(Context& ctx) {
  const auto& c = ctx.cfg;
  auto gamma = build_interface(c);
  auto g = build_density(c);
  const SolutionField u = single_layer_solve(gamma, g, layer_options(c));
  const double eps = c.verify_eps;
  CsvWriter csv(ctx.dir / "verify.csv", {"check", "value", "threshold", "pass"});
  auto check = [&](const std::string& name, double value, double threshold, bool pass, const std::string& op) {
    csv.row_strings({name, num(value), num(threshold), pass ? "1" : "0"});
    ctx.metric(name, value, op);
    ctx.rep.passed = ctx.rep.passed && pass;
    ctx.rep.summary.push_back(fmt::format("{:<32} {:>12.4e}  (threshold {:.1e})  {}", name, value, threshold, pass ? "PASS" : "FAIL"));
  };

  // Mean value property away from Gamma.
  std::mt19937_64 rng(c.seed);
  auto unif = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Vec3> pts;
  const double reach = 1.0 - eps - 1e-3;
  std::size_t draws = 0;
  while (pts.size() < static_cast<std::size_t>(c.verify_points) && draws < 1000u * c.verify_points) {
    ++draws;
    Vec3 p = make_point(2.0 * unif() - 1.0, c.dimension == 3 ? 2.0 * unif() - 1.0 : 0.0, 2.0 * unif() - 1.0);
    p = reach * p;
    if (norm(p) >= reach) continue;
    if (!chord_set(*gamma, p, eps).empty) continue;
    pts.push_back(p);
  }
  std::vector<double> diff(pts.size());
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    diff[i] = std::abs(ball_average(u, pts[i], eps, c.verify_average_order).value - u(pts[i]));
  });
  double mv = 0.0;
  for (double d : diff) mv = std::max(mv, d);
  check("mean_value_max", mv, 1e-6, mv < 1e-6, "ball_average");

  // Laplacian of u_eps against g_eps at points of Gamma_eps.
  const AveragedField avg(u, eps, 8);
  double worst_std = 0.0, worst_ext = 0.0, worst_ratio = INFINITY;
  for (double t : {0.0, 0.2}) {
    for (double off : {0.0, 0.3 * eps}) {
      const Vec3 x = gamma->lift_point({t, 0.0}) + Vec3{0.0, 0.0, off};
      const auto m1 = laplacian_match(avg, x, c.verify_h);
      const auto m2 = laplacian_match(avg, x, 0.5 * c.verify_h);
      worst_std = std::max(worst_std, m1.residual);
      worst_ext = std::max(worst_ext, m1.extrapolated_residual);
      worst_ratio = std::min(worst_ratio, m1.residual / std::max(m2.residual, 1e-300));
    }
  }
  ctx.metric("laplacian_match_standard", worst_std, "laplacian_match");
  check("laplacian_match_extrapolated", worst_ext, 1e-3, worst_ext < 1e-3, "laplacian_match");
  check("laplacian_refinement_ratio", worst_ratio, 2.0, worst_ratio > 2.0, "laplacian_match");

  // Distributional identity.
  const int vol = c.dimension == 2 ? c.volume_order : std::min(c.volume_order, 4);
  const auto bumps = standard_bumps(*gamma);
  double dres = 0.0;
  for (const auto& b : bumps) dres = std::max(dres, verify_distributional(u, *gamma, *g, b, vol, c.surface_order).residual);
  check("distributional_residual", dres, 1e-4, dres < 1e-4, "verify_distributional");
  ctx.table("verify", "verify.csv", csv.rows() - 1);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  Context ctx{config, out_dir, {}, json::object()};
  ctx.rep.command = config.command;
  if (config.command == "solve") run_solve(ctx);
  else if (config.command == "flat") run_flat(ctx);
  else if (config.command == "stability-sweep") run_sweep(ctx);
  else if (config.command == "regularity-fit") run_regularity(ctx);
  else run_verify(ctx);

  json report;
  report["command"] = config.command;
  report["config"] = config_echo(config);
  json metrics = json::object();
  json ops = json::array();
  for (const auto& m : ctx.rep.metrics) {
    metrics[m.name] = std::isfinite(m.value) ? json(m.value) : json(num(m.value));
    ops.push_back({{"metric", m.name}, {"operation", m.operation}});
  }
  report["metrics"] = metrics;
  report["details"] = ctx.extra;
  json tables = json::array();
  for (const auto& t : ctx.rep.tables) tables.push_back({{"name", t.name}, {"file", t.file}, {"rows", t.rows}});
  report["tables"] = tables;
  report["warnings"] = ctx.rep.warnings;
  report["passed"] = ctx.rep.passed;
  report["provenance"] = {{"version", version()},
                          {"tolerances",
                           {{"panel_tolerance", config.panel_tolerance},
                            {"surface_order", config.surface_order},
                            {"volume_order", config.volume_order},
                            {"ladder_t0", config.ladder_t0},
                            {"ladder_rungs", config.ladder_rungs}}},
                          {"operations", ops}};
  write_text(out_dir / "report.json", report.dump(2) + "\n");
  return ctx.rep;
}

void write_error_record(const std::filesystem::path& out_dir, const std::string& kind, const std::string& message) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  json j = {{"error", {{"kind", kind}, {"message", message}}}, {"version", version()}};
  std::ofstream out(out_dir / "error.json");
  out << j.dump(2) << "\n";
}

}  // namespace translab
