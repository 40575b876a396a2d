// Acceptance runs, one per criterion: `cylsp_acceptance N` prints one
// PASS/FAIL line (plus detail lines) and exits nonzero on FAIL.

#include "cylsp/config.hpp"
#include "cylsp/errors.hpp"
#include "cylsp/harness.hpp"
#include "cylsp/limit2d.hpp"
#include "cylsp/penalty.hpp"
#include "cylsp/poisson.hpp"
#include "cylsp/solver.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

using namespace cylsp;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// collects sub-results; the verdict is the conjunction
struct Verdict {
  bool ok = true;
  void sub(bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Verdict::sub(bool pass, const char* fmt, ...) {
  ok = ok && pass;
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  std::printf("  [%s] %s\n", pass ? "ok" : "FAIL", buf);
}

std::shared_ptr<const CylGrid> square(double h, std::size_t n) {
  return std::make_shared<CylGrid>(CylGrid::uniform(0, h, n, h, n, true));
}

CylField bump(std::shared_ptr<const CylGrid> g, double s0, double r0, double w, double amp) {
  CylField f(g);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nr(); ++j) {
      const double q = (std::pow(g->s(i) - s0, 2) + std::pow(g->r(j) - r0, 2)) / (w * w);
      f(i, j) = q < 1 ? amp * std::exp(-1 / (1 - q)) : 0.0;
    }
  return f;
}

// ---------------------------------------------------------------- 1

void scaling_laws(Verdict& v) {
  const auto cache = make_ground_energy_cache(4.0);
  double dev = 0;
  for (double a : {0.5, 1.0, 2.0, 3.0})
    for (double b : {0.5, 1.0, 2.0})
      for (double lam : {0.25, 2.0, 4.0, 9.0})
        dev = std::max(dev, rel(ground_energy(lam * a, lam * b, cache) * std::sqrt(lam),
                                ground_energy(a, b, cache)));
  v.sub(dev <= 1e-12, "(iv) E(la,lb) l^(1/2) = E(a,b): max rel deviation %.3e (tol 1e-12)", dev);
  double hom = 0;
  for (double lam : {0.25, 2.0, 4.0, 9.0})
    hom = std::max(hom, rel(ground_energy(lam * 2, lam * 3, cache), ground_energy(2, 3, cache)));
  std::printf("  [info] E(la,lb) = E(a,b) holds to %.3e (degree-0 homogeneity at p = 4)\n", hom);

  double dv = 0;
  for (double a : {1.0, 2.0})
    for (double b : {1.0, 2.0}) {
      const double shot = shoot_radial_ground_state(a, b, 4.0).energy;
      const double d = rel(ground_energy(a, b, cache), shot);
      std::printf("  (a,b) = (%g,%g): closed form %.10f, shot %.10f, rel %.2e\n", a, b,
                  ground_energy(a, b, cache), shot, d);
      dv = std::max(dv, d);
    }
  v.sub(dv <= 1e-3, "(v) closed form vs shooting on {1,2}^2: max rel %.3e (tol 1e-3)", dv);
}

// ---------------------------------------------------------------- 2

void dual_oracle(Verdict& v) {
  for (double p : {3.5, 4.0, 5.0}) {
    const double shot = shoot_radial_ground_state(1, 1, p).energy;
    const auto gf = gradient_flow_ground_state(1, 1, p);
    const double d = rel(gf.state.energy, shot);
    v.sub(d <= 1e-3, "p = %g: shooting %.8f, gradient flow %.8f (%d its), rel %.2e", p, shot,
          gf.state.energy, gf.iterations, d);
  }
}

// ---------------------------------------------------------------- 3

void poisson_correctness(Verdict& v) {
  const double o0 = oracle::unit_ball_potential(0.0), o2 = oracle::unit_ball_potential(2.0);
  v.sub(rel(o0, 0.5) < 1e-8 && rel(o2, 1.0 / 6) < 1e-8,
        "3D quadrature oracle: ball centre %.10f, |x|=2 %.10f", o0, o2);

  const double h = 1.0 / 64;
  const std::size_t n = 72;
  const auto g = square(h, n);
  CylField ball(g);
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
  const double c0 = potential_at(ball, 0, 0), c2 = potential_at(ball, 0, 2);
  v.sub(rel(c0, o0) <= 1e-3, "ball at h = 1/64, centre: %.8f vs %.8f, rel %.2e", c0, o0,
        rel(c0, o0));
  v.sub(rel(c2, o2) <= 1e-3, "ball at h = 1/64, |x| = 2: %.8f vs %.8f, rel %.2e", c2, o2,
        rel(c2, o2));

  const auto gg = square(1.0 / 32, 224);
  CylField gauss(gg);
  for (std::size_t i = 0; i < gg->ns(); ++i)
    for (std::size_t j = 0; j < gg->nr(); ++j)
      gauss(i, j) = std::exp(-(std::pow(gg->s(i), 2) + std::pow(gg->r(j), 2)));
  for (double x : {0.5, 1.5, 3.0}) {
    const double want = oracle::gaussian_potential(x);
    const double got = potential_at(gauss, 0, x);
    v.sub(rel(got, want) <= 1e-3, "gaussian, |x| = %g: %.8f vs oracle %.8f, rel %.2e", x, got,
          want, rel(got, want));
  }

  double worst = 0, worst_m = 0;
  for (double ds : {0.0, 0.5})
    for (int k = 0; k <= 60; ++k) {
      // m from 0 to 1 - 1e-6: r = 1, r' chosen so that 4 r r' / ((r + r')² + ds²) = m
      const double m = k == 0 ? 0.0 : 1 - std::pow(10.0, -6.0 * (k - 1) / 59);
      double rp;
      if (m == 0) {
        rp = 0.0;
      } else {
        // m ((1 + x)² + ds²) = 4x  ->  m x² + (2m - 4) x + m (1 + ds²) = 0
        const double A = m, B = 2 * m - 4, C = m * (1 + ds * ds);
        const double disc = B * B - 4 * A * C;
        if (disc < 0) continue;
        rp = (-B - std::sqrt(disc)) / (2 * A);
      }
      if (ds == 0 && rp == 1.0) continue;
      const double want = oracle::ring_average(1.0, rp, ds);
      const double d = rel(ring_kernel(1.0, rp, ds), want);
      if (d > worst) worst = d, worst_m = m;
    }
  v.sub(worst <= 1e-8, "ring kernel vs angular quadrature, m in [0, 1-1e-6]: max rel %.2e (at m = %.8f)",
        worst, worst_m);
}

// ---------------------------------------------------------------- 4

void hardy(Verdict& v) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0, 1);
  const auto g = square(1.0 / 24, 72);
  for (double kappa : {0.1, 0.2, 0.24}) {
    PenalizationParams par;
    par.kappa = kappa;
    int pass = 0;
    double worst = kInfinity;
    for (int k = 0; k < 200; ++k) {
      const double r0 = 0.05 + 1.6 * U(rng), w = 0.2 + 1.0 * U(rng);
      const CylField u = bump(g, 1.2 * U(rng), r0, w, 0.5 + U(rng));
      const HardyCheck h = hardy_positivity_check(u, par, 1e-6);
      if (h.pass) ++pass;
      worst = std::min(worst, (h.lhs - h.rhs) / h.gradient);
    }
    v.sub(pass == 200, "kappa = %.2f: %d/200 bumps pass, min (lhs - rhs)/grad = %.3e", kappa, pass,
          worst);
  }
}

// ---------------------------------------------------------------- 5

void g_properties(Verdict& v) {
  const ProblemConfig cfg = load_config(CYLSP_CONFIG_DIR "/flagship.cfg");
  const PotentialSpec& spec = cfg.problem.spec;
  const RegionLambda& L = cfg.problem.region;
  const double p = cfg.problem.p;
  PenalizationParams par = cfg.problem.par;
  par.eps = 0.1;

  std::vector<CylPoint> xs;
  for (int k = 0; k < 50; ++k) {
    const double t = k / 49.0;
    xs.push_back({-3.0 + 6.0 * std::fmod(7.0 * t, 1.0), 0.05 + 5.95 * t});
  }
  std::vector<double> ts;
  for (int k = 0; k < 50; ++k) ts.push_back(std::pow(10.0, -4.0 + 6.0 * k / 49.0));

  int inside = 0;
  bool g1 = true, g2 = true, g3 = true, g4 = true;
  double g3_in = 0;
  for (const CylPoint& x : xs) {
    const bool in = L.contains(x);
    inside += in;
    const double K = spec.K(x.s, x.r);
    const double thr = par.eps * par.eps * hardy_potential(par, x.s, x.r) + par.mu * spec.V(x.s, x.r);
    auto g = [&](double t) { return penalized_g(spec, L, par, p, x.s, x.r, t); };
    auto G = [&](double t) { return penalized_G(spec, L, par, p, x.s, x.r, t); };
    g1 = g1 && (g(1e-6) / 1e-6 < 1e-3 * g(1.0));
    double prev = 0;
    for (double t : ts) {
      const double gv = g(t), Gv = G(t);
      g2 = g2 && gv / std::pow(t, p) <= K * (1 + 1e-14);
      if (in) {
        g2 = g2 && rel(gv / std::pow(t, p), K) < 1e-14;
        g3_in = std::max(g3_in, rel((p + 1) * Gv, gv * t));
      } else {
        g3 = g3 && 2 * Gv <= gv * t * (1 + 1e-14) && gv * t <= thr * t * t * (1 + 1e-14);
      }
      g4 = g4 && gv / t >= prev * (1 - 1e-14);
      prev = gv / t;
    }
  }
  g3 = g3 && g3_in < 1e-13;
  std::printf("  lattice: 50 points (%d inside the region) x 50 values in [1e-4, 1e2], eps = %g\n",
              inside, par.eps);
  v.sub(g1, "(g1) g(x,s)/s at s = 1e-6 below 1e-3 of its value at s = 1");
  v.sub(g2, "(g2) g/s^p = K inside, <= K outside");
  v.sub(g3, "(g3) (p+1)G = g s inside (max rel %.1e); 2G <= g s <= (eps^2 H + mu V) s^2 outside",
        g3_in);
  v.sub(g4, "(g4) s -> g(x,s)/s nondecreasing");
}

// ---------------------------------------------------------------- 6

void gradient_consistency(Verdict& v) {
  const ProblemConfig cfg = load_config(CYLSP_CONFIG_DIR "/flagship.cfg");
  PenalizedProblem prob = cfg.problem;
  prob.par.eps = 0.3;
  const auto g = std::make_shared<CylGrid>(CylGrid::uniform(0, 0.125, 24, 0.125, 32, true));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0, 1);
  double worst = kInfinity;
  int pass = 0;
  for (int k = 0; k < 20; ++k) {
    CylField u = bump(g, 1.5 * U(rng), 0.5 + 3 * U(rng), 0.5 + 1.5 * U(rng), 0.3 + 1.2 * U(rng));
    CylField w(g);
    for (auto& x : w.values()) x = U(rng) - 0.5;
    const double exact = l2_inner(grad_J(prob, u), w);
    double err[2];
    int e = 0;
    for (double h : {1e-3, 1e-4}) {
      CylField a = u, b = u;
      for (std::size_t q = 0; q < a.values().size(); ++q) {
        a.values()[q] += h * w.values()[q];
        b.values()[q] -= h * w.values()[q];
      }
      err[e++] = std::abs((energy_J(prob, a) - energy_J(prob, b)) / (2 * h) - exact);
    }
    const double order = std::log10(err[0] / err[1]);
    std::printf("  pair %2d: dJ[v] = %+.10e, errors %.2e, %.2e, order %.2f\n", k, exact, err[0],
                err[1], order);
    worst = std::min(worst, order);
    pass += order >= 1.9;
  }
  v.sub(pass == 20, "observed order >= 1.9 on %d/20 pairs (min %.2f)", pass, worst);
}

// ---------------------------------------------------------------- 7

void flagship(Verdict& v) {
  SweepConfig cfg = SweepConfig::from(load_config(CYLSP_CONFIG_DIR "/flagship.cfg"));
  cfg.out_dir = CYLSP_ACCEPTANCE_OUT "/flagship";
  const SweepReport rep = run_sweep(cfg);
  std::printf("  E(1,1) = %.10f, r* = %.8f (interior %d), inf M = %.8f, pi inf M = %.6f\n",
              rep.E11, rep.r_target, rep.interior, rep.inf_M, rep.target_pi_infM);
  std::printf("  %6s %11s %11s %9s %8s %9s %9s %7s %9s %9s %7s\n", "eps", "J/eps2", "c/eps2",
              "r*", "s*", "h", "residual", "its", "lam_hat", "profile", "secs");
  for (const SweepRow& r : rep.rows)
    std::printf("  %6.3f %11.5f %11.5f %9.5f %8.5f %9.5f %9.2e %7d %9.4f %9.5f %7.1f%s\n", r.eps,
                r.J_over_eps2, r.c_eps_over_eps2, r.r_star, r.s_star, r.h, r.residual,
                r.iterations, r.lambda_hat, r.profile_deviation, r.seconds,
                r.ok ? "" : ("  " + r.error).c_str());

  const auto& rows = rep.rows;
  bool a = !rows.empty();
  for (const SweepRow& r : rows) a = a && r.ok && r.residual <= 1e-6 && r.positive;
  v.sub(a, "(a) every solve converges with residual <= 1e-6 and u > 0");

  bool b = true, c = true;
  for (const SweepRow& r : rows) {
    b = b && std::abs(r.r_star - rep.r_target) <= std::max(2 * r.h, 2 * r.eps);
    c = c && std::abs(r.s_star) <= 2 * r.h;
  }
  v.sub(b, "(b) |r*(eps) - r*| <= max(2h, 2eps) on every row");
  v.sub(c, "(c) |s*| <= 2h on every row");

  auto gaps = [&](double target) {
    std::vector<double> out;
    for (const SweepRow& r : rows) out.push_back(rel(r.J_over_eps2, target));
    return out;
  };
  auto decreasing = [](const std::vector<double>& x) {
    for (std::size_t k = 1; k < x.size(); ++k)
      if (!(x[k] < x[k - 1])) return false;
    return !x.empty();
  };
  const auto gp = gaps(rep.target_pi_infM);
  const bool d = !gp.empty() && gp.back() <= 0.25 && decreasing(gp);
  v.sub(d, "(d) J/eps^2 within 25%% of pi inf M = %.6f at the smallest eps (gap %.4f) and gap "
           "decreasing",
        rep.target_pi_infM, gp.empty() ? kNaN : gp.back());
  const auto g2 = gaps(2 * rep.target_pi_infM);
  std::printf("  [info] against 2 pi inf M = %.6f the gaps are", 2 * rep.target_pi_infM);
  for (double x : g2) std::printf(" %.4f", x);
  std::printf(" (%s)\n", decreasing(g2) ? "decreasing" : "not decreasing");

  bool e = false;
  for (const SweepRow& r : rows)
    if (std::abs(r.eps - 0.05) < 1e-12) e = r.original;
  v.sub(e, "(e) penalized solution solves the original problem at eps = 0.05");

  double ratio = kNaN;
  const SweepRow *r1 = nullptr, *r05 = nullptr;
  for (const SweepRow& r : rows) {
    if (std::abs(r.eps - 0.1) < 1e-12) r1 = &r;
    if (std::abs(r.eps - 0.05) < 1e-12) r05 = &r;
  }
  if (r1 && r05) ratio = r05->lambda_hat / r1->lambda_hat;
  v.sub(ratio >= 1.6 && ratio <= 2.4, "(f) lambda_hat(0.05)/lambda_hat(0.1) = %.4f in [1.6, 2.4]",
        ratio);

  std::vector<double> prof;
  for (const SweepRow& r : rows) prof.push_back(r.profile_deviation);
  v.sub(decreasing(prof), "(g) rescaled profile deviation decreases along the sweep");
}

// ---------------------------------------------------------------- 8

void cauchy_schwarz(Verdict& v) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0, 1);
  const auto g = square(1.0 / 10, 20);
  int pass = 0;
  double worst = -kInfinity;
  for (int k = 0; k < 100; ++k) {
    CylField f(g), h(g);
    // mix of smooth bumps and rough noise, some sparse
    if (k % 2 == 0) {
      f = bump(g, 2 * U(rng), 0.2 + 1.6 * U(rng), 0.3 + U(rng), U(rng));
      h = bump(g, 2 * U(rng), 0.2 + 1.6 * U(rng), 0.3 + U(rng), U(rng));
    } else {
      for (auto& x : f.values()) x = U(rng) < 0.3 ? U(rng) : 0.0;
      for (auto& x : h.values()) x = U(rng) * U(rng);
    }
    const double fg = interaction_energy(f, h);
    const double ff = interaction_energy(f, f), hh = interaction_energy(h, h);
    const double excess = (fg * fg - ff * hh) / (ff * hh);
    worst = std::max(worst, excess);
    pass += fg * fg <= ff * hh * (1 + 1e-12);
  }
  v.sub(pass == 100, "D(f,g)^2 <= D(f,f) D(g,g) on %d/100 pairs (max relative excess %.3e)", pass,
        worst);
}

struct Criterion {
  const char* title;
  double budget;  // seconds
  std::function<void(Verdict&)> run;
};

} // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {"scaling laws of the ground energy", 10, scaling_laws},
      {"shooting vs gradient flow ground state", 120, dual_oracle},
      {"Poisson solver correctness", 120, poisson_correctness},
      {"Hardy positivity", 60, hardy},
      {"penalized nonlinearity properties", 10, g_properties},
      {"gradient consistency", 60, gradient_consistency},
      {"flagship concentration experiment", 1800, flagship},
      {"Cauchy-Schwarz for the interaction form", 60, cauchy_schwarz},
  };
  int first = 1, last = 8;
  if (argc == 2) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > 8) {
      std::fprintf(stderr, "usage: %s [1-8]\n", argv[0]);
      return 2;
    }
  } else if (argc > 2) {
    std::fprintf(stderr, "usage: %s [1-8]\n", argv[0]);
    return 2;
  }
  bool all_ok = true;
  for (int n = first; n <= last; ++n) {
    const Criterion& c = all[n - 1];
    Verdict v;
    const auto t0 = Clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.sub(false, "exception: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    v.sub(secs < c.budget, "runtime %.1f s (budget %.0f s)", secs, c.budget);
    std::printf("CRITERION %d %s: %s\n", n, v.ok ? "PASS" : "FAIL", c.title);
    std::fflush(stdout);
    all_ok = all_ok && v.ok;
  }
  return all_ok ? 0 : 1;
}
