#include "cylsp/harness.hpp"

#include "cylsp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace cylsp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// distance from cell centre (s, r) to the circle, using the mirror image in
// s on even grids
double cell_distance(const CylGrid& g, double s, double r, CylPoint c) {
  double d = std::hypot(s - c.s, r - c.r);
  if (g.even_in_s) d = std::min(d, std::hypot(-s - c.s, r - c.r));
  return d;
}

std::string eps_tag(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "eps_%.6g", eps);
  return buf;
}

} // namespace

SweepConfig SweepConfig::from(const ProblemConfig& cfg) {
  SweepConfig c;
  c.problem = cfg.problem;
  c.eps = cfg.sweep.eps;
  c.out_dir = cfg.sweep.out;
  try {
    c.envelope = parse_envelope_case(cfg.sweep.envelope);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  c.profile_window = cfg.sweep.profile_window;
  c.tail_radius = cfg.sweep.tail_radius;
  c.tail_delta = cfg.sweep.tail_delta;
  return c;
}

void SweepConfig::validate() const {
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw ConfigError("sweep: eps values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1]))
      throw ConfigError("sweep: eps list must be strictly decreasing");
  }
  if (problem.grid.cells_per_eps < 8)
    throw ConfigError("sweep: need at least 8 cells per eps near the circle");
  if (!(profile_window >= 0) || !(tail_radius > 0) || !(tail_delta > 0))
    throw ConfigError("sweep: profile_window, tail_radius, tail_delta out of range");
  if (threads < 1) throw ConfigError("sweep: threads must be >= 1");
  try {
    problem.validate();
  } catch (const InvariantViolation& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

double rescaled_profile_check(const CylField& u, CylPoint center, double eps,
                              const GroundState2D& ground, double R) {
  if (!(eps > 0) || !(R >= 0)) throw DomainError("profile check needs eps > 0, R >= 0");
  const CylGrid& g = u.grid();
  const double s_lo = g.even_in_s ? -g.s_faces.back() : g.s_faces.front();
  const double s_hi = g.s_faces.back();
  const double rad = eps * R;
  if (center.s - rad < s_lo || center.s + rad > s_hi || center.r - rad < g.r_faces.front() ||
      center.r + rad > g.r_faces.back())
    throw DomainError("profile window leaves the grid");

  double dev = std::abs(u.sample(center.s, center.r) - ground.value(0.0));
  if (rad == 0) return dev;
  for (std::size_t i = 0; i < g.ns(); ++i) {
    const double s = g.s(i);
    for (std::size_t j = 0; j < g.nr(); ++j) {
      const double d = cell_distance(g, s, g.r(j), center);
      if (d > rad) continue;
      dev = std::max(dev, std::abs(u(i, j) - ground.value(d / eps)));
    }
  }
  return dev;
}

DecayFit fit_decay(const CylField& u, CylPoint circle, double eps, const RegionLambda& region,
                   EnvelopeCase c, double exponent) {
  if (!(eps > 0)) throw DomainError("fit_decay needs eps > 0");
  const CylGrid& g = u.grid();
  const bool three = c == EnvelopeCase::InfinityQuadratic || c == EnvelopeCase::OriginQuadratic;
  const int nc = three ? 3 : 2;

  std::vector<double> rows, rhs, wts;
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nr(); ++j) {
      const double v = u(i, j);
      if (!(v > 1e-12)) continue;
      const double s = g.s(i), r = g.r(j);
      if (!region.contains({s, r})) continue;
      const double d = cell_distance(g, s, r, circle);
      if (d < 2 * eps) continue;
      const double z = d / (1 + d);
      const double n = std::hypot(s, r);
      double y = std::log(v);
      double f1 = -z, f2 = 0.0;
      switch (c) {
        case EnvelopeCase::Base:
          y += std::log1p(n);
          break;
        case EnvelopeCase::InfinityQuadratic:
          f2 = -std::log1p(n);
          break;
        case EnvelopeCase::InfinitySubquadratic:
          f1 = -z * std::pow(1 + n, 0.5 * (2 - exponent));
          break;
        case EnvelopeCase::OriginQuadratic:
          f2 = -std::log(n / (1 + n));
          break;
        case EnvelopeCase::OriginSuperquadratic:
          f1 = -z * std::pow(n / (1 + n), 0.5 * (exponent - 2));
          break;
      }
      rows.push_back(1.0);
      rows.push_back(f1);
      if (three) rows.push_back(f2);
      rhs.push_back(y);
      wts.push_back(g.ds(i) * g.dr(j));
    }
  const std::size_t m = rhs.size();
  if (m < 10) throw SolverError("fit_decay: only " + std::to_string(m) + " usable samples");

  Eigen::MatrixXd A(m, nc);
  Eigen::VectorXd b(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double sw = std::sqrt(wts[k]);
    for (int q = 0; q < nc; ++q) A(k, q) = sw * rows[k * nc + q];
    b(k) = sw * rhs[k];
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  const double wsum = std::accumulate(wts.begin(), wts.end(), 0.0);

  DecayFit f;
  f.C = std::exp(x(0));
  f.lambda_hat = x(1);
  f.lambda = x(1) * eps;
  if (three) f.nu = x(2) * eps;
  f.rms = std::sqrt((A * x - b).squaredNorm() / wsum);
  f.samples = m;
  return f;
}

double tail_max(const CylField& u, CylPoint circle, double eps, double R) {
  const CylGrid& g = u.grid();
  double m = 0.0;
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nr(); ++j)
      if (cell_distance(g, g.s(i), g.r(j), circle) > R * eps) m = std::max(m, u(i, j));
  return m;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
  }
  fs::rename(tmp, target);
}

SweepRow solve_row(const SweepConfig& cfg, double eps, double E11, CylPoint center,
                   SolveReport* out) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepRow row;
  row.eps = eps;
  PenalizedProblem prob = cfg.problem;
  prob.par.eps = eps;
  row.h = eps / prob.grid.cells_per_eps;
  const double e2 = eps * eps;
  try {
    auto grid = make_grid(prob, center);
    Discretization disc(prob, grid);
    const double p = prob.p;
    const auto ground = shoot_radial_ground_state(prob.spec.V(center.s, center.r),
                                                  prob.spec.K(center.s, center.r), p);
    const CylField u0 = build_ansatz(disc, ground, center);
    SolveReport rep = descent_solve(disc, u0);
    rep.c_eps = mountain_pass_level(disc, rep.u);
    const OriginalCheck oc = verify_original(disc, rep);

    row.ok = rep.residual <= prob.opts.tol && rep.positive;
    if (!row.ok) row.error = "not converged or not positive";
    row.J_over_eps2 = rep.energy / e2;
    row.c_eps_over_eps2 = rep.c_eps / e2;
    row.s_star = rep.s_star;
    row.r_star = rep.r_star;
    row.u_max = rep.u_max;
    row.residual = rep.residual;
    row.iterations = rep.iterations;
    row.positive = rep.positive;
    row.penal_active = rep.penalization_active;
    row.original = oc.flag;
    row.original_margin = oc.min_margin;
    row.energy_norm_over_eps2 = rep.energy_norm / e2;
    row.interaction_over_eps2 = rep.interaction / e2;

    const CylPoint xbar{rep.s_star, rep.r_star};
    row.distance_to_boundary = prob.region.distance_to_boundary(xbar);
    row.M_at_max = auxiliary_potential_M(prob.spec, E11, p, xbar.s, xbar.r);
    row.tail_max = tail_max(rep.u, xbar, eps, cfg.tail_radius);
    try {
      const auto gbar =
          shoot_radial_ground_state(prob.spec.V(xbar.s, xbar.r), prob.spec.K(xbar.s, xbar.r), p);
      row.profile_deviation = rescaled_profile_check(rep.u, xbar, eps, gbar, cfg.profile_window);
    } catch (const std::exception&) {
      row.profile_deviation = kNaN;
    }
    double expo = 0.0;
    if (cfg.envelope == EnvelopeCase::InfinitySubquadratic) expo = prob.spec.alpha.value_or(0.0);
    if (cfg.envelope == EnvelopeCase::OriginSuperquadratic) expo = prob.spec.gamma.value_or(0.0);
    try {
      row.fit = fit_decay(rep.u, xbar, eps, prob.region, cfg.envelope, expo);
      row.lambda_hat = row.fit.lambda_hat;
    } catch (const SolverError&) {
      row.lambda_hat = kNaN;
    }
    if (!cfg.out_dir.empty()) {
      namespace fs = std::filesystem;
      const fs::path dir = fs::path(cfg.out_dir) / eps_tag(eps);
      const fs::path tmp = dir.string() + ".tmp";
      fs::remove_all(tmp);
      rep.write(tmp.string());
      fs::remove_all(dir);
      fs::rename(tmp, dir);
    }
    if (out) *out = std::move(rep);
  } catch (const SolverError& e) {
    row.ok = false;
    row.error = e.what();
  } catch (const DomainError& e) {
    row.ok = false;
    row.error = e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepReport rep;
  const double p = cfg.problem.p;
  rep.E11 = make_ground_energy_cache(p).E11;
  const RingMinimum rm = minimize_M_on_ring(cfg.problem.spec, rep.E11, p, cfg.problem.region);
  rep.r_target = rm.r_star;
  rep.inf_M = rm.value;
  rep.target_pi_infM = std::numbers::pi * rm.value;
  rep.interior = rm.interior;

  const CylPoint center{0.0, rm.r_star};
  rep.rows.resize(cfg.eps.size());
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cfg.eps.size());
  if (nthreads <= 1) {
    for (std::size_t k = 0; k < cfg.eps.size(); ++k)
      rep.rows[k] = solve_row(cfg, cfg.eps[k], rep.E11, center);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < cfg.eps.size();)
          rep.rows[k] = solve_row(cfg, cfg.eps[k], rep.E11, center);
      });
    for (auto& th : pool) th.join();
  }
  if (!cfg.out_dir.empty()) {
    write_text_atomic(cfg.out_dir + "/sweep.csv", rep.to_csv());
    write_text_atomic(cfg.out_dir + "/sweep_diagnostics.csv", rep.diagnostics_csv());
  }
  return rep;
}

namespace {

void fixed_columns(std::ostream& os, const SweepRow& r, const SweepReport& rep) {
  auto num = [&](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    os << buf;
  };
  num(r.eps);
  for (double x : {r.c_eps_over_eps2, r.J_over_eps2, r.r_star, r.s_star, r.u_max, r.lambda_hat}) {
    os << ',';
    num(r.ok ? x : kNaN);
  }
  os << ',' << (r.penal_active ? 1 : 0) << ',';
  num(rep.target_pi_infM);
  os << ',';
  num(rep.r_target);
}

} // namespace

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os << "eps,c_eps_over_eps2,J_over_eps2,r_star,s_star,u_max,lambda_hat,penal_active,"
        "target_pi_infM,target_r_star\n";
  for (const auto& r : rows) {
    fixed_columns(os, r, *this);
    os << '\n';
  }
  return os.str();
}

std::string SweepReport::diagnostics_csv() const {
  std::ostringstream os;
  os << "eps,c_eps_over_eps2,J_over_eps2,r_star,s_star,u_max,lambda_hat,penal_active,"
        "target_pi_infM,target_r_star,ok,h,residual,iterations,original,original_margin,"
        "decay_C,decay_rms,decay_samples,profile_deviation,tail_max,distance_to_boundary,"
        "energy_norm_over_eps2,interaction_over_eps2,M_at_max,seconds,error\n";
  os.precision(10);
  for (const auto& r : rows) {
    fixed_columns(os, r, *this);
    os << ',' << (r.ok ? 1 : 0) << ',' << r.h << ',' << r.residual << ',' << r.iterations << ','
       << (r.original ? 1 : 0) << ',' << r.original_margin << ',' << r.fit.C << ',' << r.fit.rms
       << ',' << r.fit.samples << ',' << r.profile_deviation << ',' << r.tail_max << ','
       << r.distance_to_boundary << ',' << r.energy_norm_over_eps2 << ','
       << r.interaction_over_eps2 << ',' << r.M_at_max << ',' << r.seconds << ",\"";
    for (char ch : r.error) os << (ch == '"' ? '\'' : ch);
    os << "\"\n";
  }
  return os.str();
}

} // namespace cylsp
