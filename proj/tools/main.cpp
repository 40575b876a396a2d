// cylsp command line: ground states, M tables, Poisson checks, solves and sweeps.

#include "cylsp/config.hpp"
#include "cylsp/errors.hpp"
#include "cylsp/harness.hpp"
#include "cylsp/limit2d.hpp"
#include "cylsp/model.hpp"
#include "cylsp/penalty.hpp"
#include "cylsp/poisson.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace cylsp;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--eps: cannot parse '" + item + "'");
    }
  }
  return out;
}

struct Common {
  std::string config;
  std::string eps;
  std::string out;
  double tol = -1.0;
  int threads = 1;
  double p = 4.0;
};

ProblemConfig need_config(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  ProblemConfig cfg = load_config(c.config);
  if (c.tol > 0) cfg.problem.opts.tol = c.tol;
  if (!c.out.empty()) cfg.sweep.out = c.out;
  if (!c.eps.empty()) cfg.sweep.eps = parse_list(c.eps);
  return cfg;
}

int cmd_limit(const Common& c) {
  const double tol = c.tol > 0 ? c.tol : 1e-8;
  const GroundEnergyCache cache = make_ground_energy_cache(c.p, tol);
  const std::string dir = c.out.empty() ? "." : c.out;
  char name[64], prof[64];
  std::snprintf(name, sizeof name, "/E11_p%g.json", c.p);
  std::snprintf(prof, sizeof prof, "/ground_state_p%g.txt", c.p);
  write_text_atomic(dir + name, cache.to_text() + "\n");
  const GroundState2D g = shoot_radial_ground_state(1.0, 1.0, c.p, 1e-6);
  write_profile(dir + prof, g);
  std::printf("p %g  E(1,1) %.12g  w(0) %.12g  nehari %.3g  residual %.3g\n", c.p, cache.E11,
              g.w.front(), g.nehari_residual, g.equation_residual);
  std::printf("cache written to %s%s\n", dir.c_str(), name);
  return 0;
}

int cmd_mpot(const Common& c) {
  const ProblemConfig cfg = need_config(c);
  const PenalizedProblem& pb = cfg.problem;
  const double E11 = make_ground_energy_cache(pb.p).E11;
  const RegionLambda& L = pb.region;
  std::printf("%12s %14s %14s %14s\n", "r", "V", "M", "A");
  const int rows = 41;
  for (int k = 0; k < rows; ++k) {
    const double r = L.r0 - L.a_r + 2 * L.a_r * k / (rows - 1);
    std::printf("%12.6f %14.8g %14.8g %14.8g\n", r, pb.spec.V(0, r),
                auxiliary_potential_M(pb.spec, E11, pb.p, 0, r),
                concentration_functional_A(pb.spec, pb.p, 0, r));
  }
  const RingMinimum m = minimize_M_on_ring(pb.spec, E11, pb.p, L);
  std::printf("minimizer r* %.9f  inf M %.9g  boundary %.9g  inf over region %.9g  interior %d  "
              "below_twice_inf %d  pi*infM %.9g\n",
              m.r_star, m.value, m.boundary_value, m.inf_over_region, m.interior,
              m.below_twice_inf, std::numbers::pi * m.value);
  return 0;
}

int cmd_poisson(const Common&) {
  const double h = 1.0 / 64;
  const std::size_t n = 72;
  auto g = std::make_shared<CylGrid>(CylGrid::uniform(0, h, n, h, n, true));
  auto gg = std::make_shared<CylGrid>(CylGrid::uniform(0, 1.0 / 32, 224, 1.0 / 32, 224, true));
  CylField ball(g), gauss(gg);
  const int q = 8;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double in = 0, wt = 0;
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
          const double s = g->s_faces[i] + (a + 0.5) * h / q;
          const double r = g->r_faces[j] + (b + 0.5) * h / q;
          wt += r;
          if (s * s + r * r < 1) in += r;
        }
      ball(i, j) = in / wt;
    }
  for (std::size_t i = 0; i < gg->ns(); ++i)
    for (std::size_t j = 0; j < gg->nr(); ++j)
      gauss(i, j) = std::exp(-(std::pow(gg->s(i), 2) + std::pow(gg->r(j), 2)));
  bool ok = true;
  auto line = [&](const char* what, double got, double want) {
    const double rel = std::abs(got - want) / std::abs(want);
    const bool pass = rel <= 1e-3;
    ok = ok && pass;
    std::printf("%-28s %14.9f %14.9f  rel %.2e  %s\n", what, got, want, rel, pass ? "ok" : "FAIL");
  };
  line("ball, centre", potential_at(ball, 0, 0), 0.5);
  line("ball, |x| = 2", potential_at(ball, 0, 2), 1.0 / 6);
  const double sq = std::pow(std::numbers::pi, 1.5);
  for (double x : {0.5, 1.0}) {
    const double want = sq * std::erf(x) / (4 * std::numbers::pi * x);
    line(x == 0.5 ? "gaussian, |x| = 0.5" : "gaussian, |x| = 1", potential_at(gauss, 0, x), want);
  }
  return ok ? 0 : 1;
}

int cmd_solve(const Common& c) {
  ProblemConfig cfg = need_config(c);
  SweepConfig sc = SweepConfig::from(cfg);
  if (c.eps.empty()) {
    sc.eps = {cfg.problem.par.eps};
  } else if (sc.eps.size() != 1) {
    throw ConfigError("solve takes a single --eps value");
  }
  if (c.out.empty()) sc.out_dir.clear();
  sc.validate();
  const double E11 = make_ground_energy_cache(sc.problem.p).E11;
  const RingMinimum m = minimize_M_on_ring(sc.problem.spec, E11, sc.problem.p, sc.problem.region);
  const SweepRow row = solve_row(sc, sc.eps.front(), E11, {0.0, m.r_star});
  SweepReport rep;
  rep.rows = {row};
  rep.r_target = m.r_star;
  rep.inf_M = m.value;
  rep.target_pi_infM = std::numbers::pi * m.value;
  std::cout << rep.diagnostics_csv();
  return row.ok ? 0 : 1;
}

int cmd_sweep(const Common& c) {
  SweepConfig sc = SweepConfig::from(need_config(c));
  sc.threads = c.threads;
  const SweepReport rep = run_sweep(sc);
  std::cout << rep.to_csv();
  bool ok = true;
  for (const auto& r : rep.rows) {
    if (!r.ok) std::fprintf(stderr, "eps %g failed: %s\n", r.eps, r.error.c_str());
    ok = ok && r.ok;
  }
  if (!sc.out_dir.empty()) std::fprintf(stderr, "reports in %s\n", sc.out_dir.c_str());
  return ok ? 0 : 1;
}

int cmd_check(const Common& c) {
  const ProblemConfig cfg = need_config(c);
  const PenalizedProblem& pb = cfg.problem;
  bool ok = true;
  auto line = [&](const std::string& what, bool pass, const std::string& detail) {
    ok = ok && pass;
    std::printf("%-30s %s  %s\n", what.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  };
  const GrowthClass gc = classify_growth(pb.spec, pb.p);
  line("growth classification", gc.admissible(), gc.classifiable ? "" : gc.reason);

  const GroundEnergyCache cache = make_ground_energy_cache(pb.p);
  const std::vector<double> ab{1.0, 2.0}, lam{0.5, 2.0, 3.0};
  const LemmaReport lr = verify_lemma_properties(cache, ab, ab, lam);
  for (const auto& k : lr.checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "deviation %.3g (tol %.1g)", k.max_deviation, k.tolerance);
    line("E(a,b) " + k.name, k.pass, buf);
  }
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", lr.observed_scaling_degree);
    line("E(a,b) observed degree", true, buf);
  }

  const RingMinimum m = minimize_M_on_ring(pb.spec, cache.E11, pb.p, pb.region);
  line("M interior minimum on slice", m.interior, "r* " + std::to_string(m.r_star));
  line("inf M below twice inf", m.below_twice_inf, "");

  // Hardy positivity on a few random bumps
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto g = std::make_shared<CylGrid>(CylGrid::uniform(-4, 0.05, 160, 0.05, 80, false));
  int hardy_fail = 0;
  for (int t = 0; t < 20; ++t) {
    const double s0 = -2 + 4 * U(rng), r0 = 0.3 + 2.5 * U(rng), w = 0.2 + 0.8 * U(rng);
    CylField u(g);
    for (std::size_t i = 0; i < g->ns(); ++i)
      for (std::size_t j = 0; j < g->nr(); ++j) {
        const double q = (std::pow(g->s(i) - s0, 2) + std::pow(g->r(j) - r0, 2)) / (w * w);
        u(i, j) = q < 1 ? std::exp(-1 / (1 - q)) : 0.0;
      }
    if (!hardy_positivity_check(u, pb.par).pass) ++hardy_fail;
  }
  line("Hardy positivity (20 bumps)", hardy_fail == 0, std::to_string(hardy_fail) + " failures");
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cylsp: concentration on circles for Schrodinger-Poisson systems", "cylsp"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* s, bool cfg) {
    if (cfg) s->add_option("--config", c.config, "problem file (JSON)");
    s->add_option("--eps", c.eps, "comma separated eps values");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--tol", c.tol, "tolerance");
    s->add_option("--threads", c.threads, "rows solved concurrently")->check(CLI::PositiveNumber);
  };
  auto* limit = app.add_subcommand("limit", "ground state and E(1,1) cache");
  add_common(limit, false);
  limit->add_option("--p", c.p, "exponent p > 3");
  auto* mpot = app.add_subcommand("mpot", "M and A over the s = 0 slice, minimizer");
  add_common(mpot, true);
  auto* pois = app.add_subcommand("poisson-test", "Newtonian potential against closed forms");
  add_common(pois, false);
  auto* solve = app.add_subcommand("solve", "single eps solve");
  add_common(solve, true);
  auto* sweep = app.add_subcommand("sweep", "eps sweep with diagnostics");
  add_common(sweep, true);
  auto* check = app.add_subcommand("check", "invariant suites for a problem file");
  add_common(check, true);

  if (argc < 2) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*limit) return cmd_limit(c);
    if (*mpot) return cmd_mpot(c);
    if (*pois) return cmd_poisson(c);
    if (*solve) return cmd_solve(c);
    if (*sweep) return cmd_sweep(c);
    if (*check) return cmd_check(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
