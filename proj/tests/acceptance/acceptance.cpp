// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [config_dir] [work_dir]

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "inclusion_fuzz.hpp"
#include "translab/averaging.hpp"
#include "translab/flat.hpp"
#include "translab/harness.hpp"
#include "translab/parallel.hpp"
#include "translab/potential.hpp"
#include "translab/regularity.hpp"
#include "translab/stability.hpp"

using namespace translab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path g_configs = TRANSLAB_CONFIG_DIR;
fs::path g_work;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
  }
  void info(const std::string& what) { notes.push_back("info " + what); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs a shipped config into work/<name>/t<threads>; the runs double as the
// reference outputs for the determinism criterion.
ExperimentReport run_config(const std::string& name, int threads = 1, const std::string& tag = "") {
  auto cfg = ExperimentConfig::from_file(g_configs / (name + ".yaml"));
  cfg.threads = threads;
  const fs::path dir = g_work / name / fmt::format("t{}{}", threads, tag);
  fs::remove_all(dir);
  return run_experiment(cfg, dir);
}

json report_json(const std::string& name) { return json::parse(slurp(g_work / name / "t1" / "report.json")); }

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

double five_point(const std::function<double(const Vec3&)>& f, const Vec3& x, double h, int dim) {
  double lap = -2.0 * dim * f(x);
  for (int k : {0, 1, 2}) {
    if (dim == 2 && k == 1) continue;
    Vec3 e{0, 0, 0};
    e[k] = h;
    lap += f(x + e) + f(x - e);
  }
  return lap / (h * h);
}

Vec3 random_in_ball(std::mt19937_64& rng, int dim, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const Vec3 p = make_point(u(rng), dim == 3 ? u(rng) : 0.0, u(rng));
    if (norm(p) < 1.0) return radius * p;
  }
}

// ---- 1 --------------------------------------------------------------------------------------

Outcome distributional() {
  Outcome o;
  const auto g = DensityField::constant(1.0);
  for (const char* family : {"flat", "sinusoid"}) {
    const auto gam = std::string(family) == "flat"
                         ? make_test_interface(2, "flat")
                         : make_test_interface(2, "sinusoid", {{"amp", 0.05}, {"freq", 2.0}});
    const auto u = single_layer_solve(gam, g);
    double worst = 0.0, min_order = INFINITY;
    int pairs = 0;
    for (double t : {0.0, 0.3, -0.25}) {
      const TestFunction phi{gam.lift_point({t, 0.0}), 0.25, 2};
      worst = std::max(worst, verify_distributional(u, gam, g, phi).residual);
      std::vector<double> res;
      for (int vol : {2, 4, 8}) res.push_back(verify_distributional(u, gam, g, phi, vol, 4 * vol).residual);
      for (std::size_t i = 0; i + 1 < res.size(); ++i) {
        if (res[i + 1] < 1e-13) continue;  // below the quadrature floor
        min_order = std::min(min_order, std::log2(res[i] / res[i + 1]));
        ++pairs;
      }
    }
    o.check(worst < 1e-4, fmt::format("{}: residual at default orders {:.2e} < 1e-4", family, worst));
    o.check(pairs > 0 && min_order >= 2.0,
            fmt::format("{}: empirical order {:.2f} >= 2 over {} pre-floor doublings", family, min_order, pairs));
  }
  return o;
}

// ---- 2 --------------------------------------------------------------------------------------

Outcome green() {
  Outcome o;
  std::mt19937_64 rng(2);
  double sym = 0.0;
  for (int dim : {2, 3}) {
    for (int i = 0; i < 500; ++i) {
      const Vec3 x = random_in_ball(rng, dim, 1.0), y = random_in_ball(rng, dim, 1.0);
      if (norm(x - y) < 1e-8) continue;
      sym = std::max(sym, std::abs(green_ball(x, y, dim) - green_ball(y, x, dim)));
    }
  }
  o.check(sym < 1e-12, fmt::format("symmetry |G(x,y) - G(y,x)| max {:.2e} < 1e-12 on 1000 pairs", sym));

  double bdry = 0.0;
  for (int dim : {2, 3}) {
    for (int i = 0; i < 500; ++i) {
      const Vec3 y = random_in_ball(rng, dim, 0.99);
      Vec3 x = random_in_ball(rng, dim, 1.0);
      x = (1.0 / norm(x)) * x;
      bdry = std::max(bdry, std::abs(green_ball(x, y, dim)));
    }
  }
  o.check(bdry < 1e-10, fmt::format("kernel boundary values max {:.2e} < 1e-10", bdry));

  const auto u = single_layer_solve(make_test_interface(2, "sinusoid", {{"amp", 0.05}, {"freq", 6.0}}),
                                    DensityField::constant(1.0));
  double trace = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 2.0 * kPi * i / 1000.0;
    trace = std::max(trace, std::abs(u(make_point2((1.0 - 1e-12) * std::cos(a), (1.0 - 1e-12) * std::sin(a)))));
  }
  o.check(trace < 1e-10, fmt::format("single layer at radius 1 - 1e-12 max {:.2e} < 1e-10", trace));

  double min_order = INFINITY;
  for (int dim : {2, 3}) {
    for (int i = 0; i < 5; ++i) {
      const Vec3 y = random_in_ball(rng, dim, 0.5);
      Vec3 x = random_in_ball(rng, dim, 0.6);
      if (norm(x - y) < 0.3) x = y + (0.3 / std::max(norm(x - y), 1e-3)) * (x - y);
      if (norm(x) > 0.9) continue;
      const auto G = [&](const Vec3& p) { return green_ball(p, y, dim); };
      min_order = std::min(min_order, std::log2(std::abs(five_point(G, x, 0.02, dim) / five_point(G, x, 0.01, dim))));
    }
  }
  for (const Vec3& x : {make_point2(0.1, 0.4), make_point2(-0.3, -0.3)}) {
    const auto U = [&](const Vec3& p) { return u(p); };
    min_order = std::min(min_order, std::log2(std::abs(five_point(U, x, 0.04, 2) / five_point(U, x, 0.02, 2))));
  }
  o.check(min_order >= 1.8, fmt::format("discrete-Laplacian harmonicity order {:.3f} >= 1.8", min_order));
  return o;
}

// ---- 3 --------------------------------------------------------------------------------------

Outcome mean_value() {
  Outcome o;
  const auto rep = run_config("verify_flat");
  o.check(rep.metric("mean_value_max") < 1e-6,
          fmt::format("|u_eps - u| max {:.2e} < 1e-6 on 1000 points clear of Gamma", rep.metric("mean_value_max")));
  o.check(rep.metric("laplacian_match_extrapolated") < 1e-3,
          fmt::format("laplacian_match residual (h^2-extrapolated) {:.2e} < 1e-3 at eps 0.1, h 0.01",
                      rep.metric("laplacian_match_extrapolated")));
  o.info(fmt::format("plain 5-point residual {:.2e}", rep.metric("laplacian_match_standard")));
  o.check(rep.metric("laplacian_refinement_ratio") > 2.0,
          fmt::format("residual ratio under h-halving {:.3f} > 2", rep.metric("laplacian_refinement_ratio")));
  o.check(rep.metric("distributional_residual") < 1e-4,
          fmt::format("distributional residual {:.2e}", rep.metric("distributional_residual")));
  return o;
}

// ---- 4 --------------------------------------------------------------------------------------

Outcome flat() {
  Outcome o;
  const auto hol = run_config("flat_holder");
  const auto con = run_config("flat_constant");
  const auto sh = run_config("flat_shifted");
  const double asym = std::max(hol.metric("reflection_asymmetry"), con.metric("reflection_asymmetry"));
  o.check(asym < 1e-8, fmt::format("reflection asymmetry {:.2e} < 1e-8", asym));
  o.check(con.metric("jump_error_max") < 1e-3,
          fmt::format("constant g: max |jump - g| {:.2e} < 1e-3", con.metric("jump_error_max")));
  o.check(hol.metric("jump_error_max") < 1e-3,
          fmt::format("Hoelder g: max |jump - g| {:.2e} < 1e-3", hol.metric("jump_error_max")));
  o.check(sh.metric("jump_error_max") < 1e-3,
          fmt::format("shifted slab r 0.5, a 0.2: max |jump - g| {:.2e} < 1e-3", sh.metric("jump_error_max")));

  const double r = 0.5, a = 0.2;
  const auto g = DensityField::holder(1.0, 0.1, 0.6);
  const BoundaryData f = [](const Vec3& y) { return y[0] + 0.3 * y[2] * y[2]; };
  const auto v = flat_solve(FlatSlab{r, a, 2}, g, f);
  const DensityField gt("rescaled", [&](const Vec3& y) { return r * g(make_point(r * y[0], r * y[1], r * y[2] + a)); });
  const BoundaryData ft = [&](const Vec3& y) { return f(make_point(r * y[0], r * y[1], r * y[2] + a)); };
  const auto vt = flat_solve(FlatSlab{1.0, 0.0, 2}, gt, ft);
  std::mt19937_64 rng(4);
  double worst = 0.0;
  bool within = true;
  for (int i = 0; i < 50; ++i) {
    const Vec3 x = make_point(0, 0, a) + random_in_ball(rng, 2, 0.95 * r);
    const auto lhs = v.value(x);
    const auto rhs = vt.value(make_point2(x[0] / r, (x[2] - a) / r));
    const double d = std::abs(lhs.value - rhs.value);
    worst = std::max(worst, d);
    within = within && d <= 1e-10 + lhs.error + rhs.error;
  }
  o.check(within, fmt::format("rescaling law on 50 points: max |v - v~| {:.2e} within combined tolerance", worst));
  return o;
}

// ---- 5 --------------------------------------------------------------------------------------

Outcome inclusion() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto tally = testing::inclusion_fuzz(10000, 5);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(tally.configs == 10000, fmt::format("{} admissible configurations", tally.configs));
  o.check(tally.outer_violations == 0,
          fmt::format("outer inclusion: {} violations in {} checks", tally.outer_violations, tally.outer_checks));
  o.check(tally.inner_violations == 0,
          fmt::format("inner inclusion: {} violations in {} checks", tally.inner_violations, tally.inner_checks));
  o.check(secs < 10.0, fmt::format("fuzz runtime {:.2f} s < 10 s", secs));
  return o;
}

// ---- 6 --------------------------------------------------------------------------------------

Outcome stability() {
  Outcome o;
  const auto rep = run_config("stability_sweep");
  const auto rows = read_csv(g_work / "stability_sweep" / "t1" / "stability.csv");
  std::string gaps;
  for (const auto& r : rows) gaps += fmt::format(" {:.4g}", r[6]);
  o.check(rep.metric("gap_strictly_decreasing") == 1.0, "gap strictly decreasing:" + gaps);
  const double slope = rep.metric("gap_loglog_slope");
  o.check(slope >= 0.25 && slope <= 1.25, fmt::format("log-log slope {:.4f} in [0.25, 1.25]", slope));

  double eta_err = 0.0;
  for (const auto& r : rows) {
    const double th = r[0], de = r[1], ep = r[2], M = 1.0 + 2.0 * th;
    const double closed = 0.5 * (M * M * (1.0 + de) / (1.0 - ep) + (1.0 - de) / (M * M)) - 1.0;
    eta_err = std::max(eta_err, std::abs(r[7] - closed));
  }
  const double worked = StabilityParams{0.1, 0.1, 0.05, 0.5}.eta(2);
  const double worked_closed = 0.5 * (1.44 * 1.05 / 0.9 + 0.95 / 1.44) - 1.0;
  eta_err = std::max(eta_err, std::abs(worked - worked_closed));
  o.check(eta_err < 1e-12, fmt::format("eta against closed form, max error {:.1e} < 1e-12", eta_err));
  o.check(std::abs(worked - 0.169861) < 5e-7, fmt::format("eta(theta 0.1, delta 0.05, eps 0.1) = {:.6f}", worked));

  std::string margins;
  for (const auto& r : rows) margins += fmt::format(" eps {}: low {:.2e} high {:.2e};", r[2], r[8], r[9]);
  o.info("barrier margins" + margins);
  return o;
}

// ---- 7 --------------------------------------------------------------------------------------

// Single constant fitted on the first half of the increments, held out on the rest.
bool cauchy_holdout(const json& rep, double& c, double& worst) {
  const auto& inc = rep["details"]["cauchy"];
  const std::size_t half = inc.size() / 2;
  c = 0.0;
  worst = 0.0;
  for (std::size_t i = 0; i < inc.size(); ++i) {
    const double r = inc[i]["ratio"].get<double>();
    if (i < half) c = std::max(c, r);
    else worst = std::max(worst, r);
  }
  return half > 0 && worst <= c;
}

Outcome regularity() {
  Outcome o;
  const auto fl = run_config("regularity_flat");
  const auto cu = run_config("regularity_cusp");
  const auto rows = read_csv(g_work / "regularity_flat" / "t1" / "regularity.csv");
  std::string per_k;
  for (const auto& r : rows) per_k += fmt::format(" {:.3g}", r.back());
  o.check(fl.metric("jump_error_max") <= 0.05,
          fmt::format("flat g=1: max |jump - 1| {:.4f} <= 0.05 across scales (per k:{})", fl.metric("jump_error_max"),
                      per_k));
  o.info(fmt::format("flat g=1: tangential mismatch max {:.2e}", fl.metric("tangential_mismatch_max")));
  const double a = fl.metric("alpha_hat"), band = fl.metric("alpha_band");
  o.check(a + band >= 1.0, fmt::format("flat g=1: alpha_hat {:.4f} +/- {:.4f} saturates at 1", a, band));
  o.check(cu.metric("alpha_hat") >= 0.35, fmt::format("cusp alpha0 0.5, c 0.01: alpha_hat {:.4f} +/- {:.4f} >= 0.35",
                                                      cu.metric("alpha_hat"), cu.metric("alpha_band")));
  for (const char* name : {"regularity_flat", "regularity_cusp"}) {
    double c = 0.0, worst = 0.0;
    const bool ok = cauchy_holdout(report_json(name), c, worst);
    o.check(ok, fmt::format("{}: Cauchy ratios on held-out scales max {:.4f} <= fitted constant {:.4f}", name, worst, c));
  }
  return o;
}

// ---- 8 --------------------------------------------------------------------------------------

Outcome sign_loglip() {
  Outcome o;
  const auto gam = make_test_interface(2, "sinusoid", {{"amp", 0.05}, {"freq", 2.0}});
  const auto u = single_layer_solve(gam, DensityField::holder(1.0, 0.1, 0.6));
  std::vector<Vec3> pts;
  for (int i = 0; i < 128; ++i) {
    for (int k = 0; k < 128; ++k) {
      const Vec3 p = make_point2(-1.0 + 2.0 * i / 127.0, -1.0 + 2.0 * k / 127.0);
      if (norm(p) < 1.0) pts.push_back(p);
    }
  }
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), 1, [&](std::size_t i) { vals[i] = u(pts[i]); });
  const double umax = *std::max_element(vals.begin(), vals.end());
  o.check(umax <= 1e-10, fmt::format("g >= 0: max u {:.2e} <= 1e-10 on {} points of a 128^2 grid", umax, pts.size()));

  std::vector<Vec3> centres;
  for (double t : {-0.4, -0.1, 0.0, 0.25, 0.5}) {
    centres.push_back(gam.lift_point({t, 0.0}));
    centres.push_back(gam.lift_point({t, 0.0}) + Vec3{0, 0, 0.01});
  }
  const auto f = [&](const Vec3& x) { return u(x); };
  double q_top = 0.0, q_cum = 0.0, q_lo = INFINITY, q_hi = 0.0;
  for (double s : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
    const std::vector<double> sep{s};
    const double q = seminorm(f, SeminormMode::LogLip, separation_plan(2, centres, sep, 8, 8));
    if (s == 1e-2) q_top = q;
    q_cum = std::max(q_cum, q);
    q_lo = std::min(q_lo, q);
    q_hi = std::max(q_hi, q);
  }
  const double variation = q_cum / q_top - 1.0;
  o.check(variation < 0.5, fmt::format("LogLip quotient sup over separations 1e-2..1e-4 varies by {:.1f}% < 50%",
                                       100.0 * variation));
  o.info(fmt::format("per-separation LogLip quotient range [{:.4f}, {:.4f}]", q_lo, q_hi));
  return o;
}

// ---- 9 --------------------------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  for (const char* name : {"solve_sinusoid", "flat_holder", "flat_constant", "flat_shifted", "stability_sweep",
                           "regularity_flat", "regularity_cusp", "verify_flat"}) {
    const fs::path ref = g_work / name / "t1";
    if (!fs::exists(ref / "report.json")) run_config(name);
    run_config(name, 1, "_again");
    run_config(name, 3);
    std::size_t files = 0;
    bool same = true;
    for (const auto& entry : fs::directory_iterator(ref)) {
      const auto file = entry.path().filename();
      const std::string a = slurp(ref / file);
      same = same && a == slurp(g_work / name / "t1_again" / file) && a == slurp(g_work / name / "t3" / file);
      ++files;
    }
    o.check(same && files > 1, fmt::format("{}: {} files byte-identical across reruns and 1 vs 3 threads", name, files));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_configs = argv[1];
  g_work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "translab_acceptance";
  fs::create_directories(g_work);

  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds, 0 for none
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {1, "distributional identity", 30, distributional},
      {2, "Green kernel", 10, green},
      {3, "mean value and mollified Laplacian", 60, mean_value},
      {4, "flat structure", 60, flat},
      {5, "inclusion fuzzing", 10, inclusion},
      {6, "stability sweep", 600, stability},
      {7, "regularity", 600, regularity},
      {8, "sign and LogLip", 60, sign_loglip},
      {9, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, fmt::format("threw: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0) o.check(secs < c.budget, fmt::format("runtime {:.1f} s < {:.0f} s", secs, c.budget));
    failed += o.pass ? 0 : 1;
    fmt::print("{} criterion {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
    for (const auto& n : o.notes) fmt::print("    {}\n", n);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
