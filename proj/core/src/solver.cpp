#include "cylsp/solver.hpp"

#include "cylsp/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace cylsp {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// faces of one axis: uniform fine zone around c, geometric growth outside
Vec axis_faces(double lo, double hi, double c, double half, double hf, double stretch,
               double hc) {
  double a = std::max(lo, c - half);
  double b = std::min(hi, c + half);
  if (a > lo) a = c - std::floor((c - a) / hf) * hf;  // centre on a face
  Vec mid;
  const auto nf = static_cast<std::size_t>(std::ceil((b - a) / hf - 1e-9));
  for (std::size_t i = 0; i <= nf; ++i) mid.push_back(std::min(hi, a + static_cast<double>(i) * hf));
  if (mid.size() >= 2 && mid[mid.size() - 1] - mid[mid.size() - 2] < 0.5 * hf) {
    mid.pop_back();
    mid.back() = std::min(hi, mid.back());
  }
  Vec right;
  {
    double x = mid.back(), h = hf;
    while (x < hi) {
      h = std::min(h * stretch, hc);
      x += h;
      if (hi - x < 0.5 * h) x = hi;
      right.push_back(x);
    }
  }
  Vec left;
  {
    double x = mid.front(), h = hf;
    while (x > lo) {
      h = std::min(h * stretch, hc);
      x -= h;
      if (x - lo < 0.5 * h) x = lo;
      left.push_back(x);
    }
  }
  Vec faces(left.rbegin(), left.rend());
  faces.insert(faces.end(), mid.begin(), mid.end());
  faces.insert(faces.end(), right.begin(), right.end());
  return faces;
}

} // namespace

void GridPolicy::validate() const {
  if (!(cells_per_eps >= 8.0)) throw ConfigError("grid needs at least 8 cells per eps");
  if (!(fine_halfwidth > 0) || !(stretch >= 1.0) || !(coarse_h > 0) || !(pad > 0))
    throw ConfigError("grid policy parameters must be positive");
  if (excluded_radius < 0) throw ConfigError("excluded radius must be nonnegative");
}

void PenalizedProblem::validate() const {
  spec.validate();
  region.validate();
  par.validate();
  grid.validate();
  if (!(p > 3)) throw InvariantViolation("penalized problem needs p > 3");
  const GrowthClass gc = classify_growth(spec, p);
  if (!gc.classifiable) throw InvariantViolation("growth conditions undecidable: " + gc.reason);
  if (!gc.admissible()) throw InvariantViolation("no admissible pair of growth conditions");
}

std::shared_ptr<const CylGrid> make_grid(const PenalizedProblem& prob, CylPoint center) {
  prob.grid.validate();
  const double eps = prob.par.eps;
  const GridPolicy& gp = prob.grid;
  const double hf = eps / gp.cells_per_eps;
  const double half = gp.fine_halfwidth * eps;
  const double s_end = prob.region.a_s + gp.pad * eps;
  const double r_end = prob.region.r0 + prob.region.a_r + gp.pad * eps;
  auto g = std::make_shared<CylGrid>();
  g->even_in_s = true;
  g->s_faces = axis_faces(0.0, s_end, 0.0, half, hf, gp.stretch, gp.coarse_h);
  g->r_faces = axis_faces(0.0, r_end, center.r, half, hf, gp.stretch, gp.coarse_h);
  g->validate();
  return g;
}

// ---------------------------------------------------------------------------

struct Discretization::Impl {
  Eigen::SparseMatrix<double> S;
  Eigen::SparseMatrix<double> Q;  // ε²S + diag(wV)
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol;
};

Discretization::Discretization(const PenalizedProblem& prob, std::shared_ptr<const CylGrid> grid,
                               bool cache_kernel)
    : prob_(prob), grid_(std::move(grid)), impl_(std::make_unique<Impl>()) {
  const CylGrid& g = *grid_;
  g.validate();
  prob_.par.validate();
  const std::size_t ns = g.ns(), nr = g.nr(), n = g.size();
  const double mf = g.mirror_factor();
  const double eps2 = prob_.par.eps * prob_.par.eps;
  w_.resize(n);
  ws_.resize(n);
  V_.resize(n);
  K_.resize(n);
  rho_.resize(n);
  L_.assign(n, 0.0);
  inside_.assign(n, 0);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nr; ++j) {
      const std::size_t k = g.index(i, j);
      const double s = g.s(i), r = g.r(j);
      const PotentialValues pv = eval_potentials(prob_.spec, s, r);
      V_[k] = pv.V;
      K_[k] = pv.K;
      rho_[k] = pv.rho;
      ws_[k] = g.volume(i, j);
      w_[k] = mf * ws_[k];
      inside_[k] = prob_.region.contains({s, r}) ? 1 : 0;
      if (!inside_[k]) {
        const bool excl = std::hypot(s, r) < prob_.grid.excluded_radius;
        L_[k] = excl ? prob_.par.mu * pv.V : eps2 * hardy_potential(prob_.par, s, r) + prob_.par.mu * pv.V;
      }
    }

  // ∫|∇u|² with zero flux on the axis, mirror at s = 0 on even grids and
  // zero data half a cell outside the other faces
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n * 5);
  auto edge = [&](std::size_t a, std::size_t b, double c) {
    t.emplace_back(a, a, c);
    t.emplace_back(b, b, c);
    t.emplace_back(a, b, -c);
    t.emplace_back(b, a, -c);
  };
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nr; ++j) {
      const std::size_t k = g.index(i, j);
      const double rj = g.r(j);
      const double area_s = 2 * kPi * rj * g.dr(j) * mf;
      if (i + 1 < ns) edge(k, g.index(i + 1, j), area_s / (g.s(i + 1) - g.s(i)));
      else t.emplace_back(k, k, area_s / (g.s_faces[ns] - g.s(i)));
      if (i == 0 && !g.even_in_s) t.emplace_back(k, k, area_s / (g.s(0) - g.s_faces[0]));
      const double area_r = 2 * kPi * g.r_faces[j + 1] * g.ds(i) * mf;
      if (j + 1 < nr) edge(k, g.index(i, j + 1), area_r / (g.r(j + 1) - rj));
      else t.emplace_back(k, k, area_r / (g.r_faces[nr] - rj));
      if (j == 0 && g.r_faces[0] > 0)
        t.emplace_back(k, k, 2 * kPi * g.r_faces[0] * g.ds(i) * mf / (rj - g.r_faces[0]));
    }
  const auto N = static_cast<Eigen::Index>(n);
  impl_->S.resize(N, N);
  impl_->S.setFromTriplets(t.begin(), t.end());
  impl_->Q = eps2 * impl_->S;
  for (std::size_t k = 0; k < n; ++k)
    impl_->Q.coeffRef(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += w_[k] * V_[k];
  impl_->chol.compute(impl_->Q);
  if (impl_->chol.info() != Eigen::Success)
    throw SolverError("preconditioner factorization failed");

  if (cache_kernel) kernel_ = std::make_unique<KernelMatrix>(grid_);
}

Discretization::~Discretization() = default;

Vec Discretization::potential(const Vec& a, const Vec& b) const {
  const std::size_t n = size();
  Vec f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = rho_[k] * a[k] * b[k];
  if (kernel_) return kernel_->potential(f);
  Vec phi(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) f[c] *= ws_[c];
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (f[c] != 0.0) acc += cell_kernel(*grid_, t, c) * f[c];
    phi[t] = acc;
  }
  return phi;
}

namespace {
double quad_form(const Eigen::SparseMatrix<double>& M, const Vec& u) {
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  return x.dot(M * x);
}
} // namespace

double Discretization::quadratic(const Vec& u) const { return quad_form(impl_->Q, u); }
double Discretization::gradient_energy(const Vec& u) const { return quad_form(impl_->S, u); }
double Discretization::P_norm2(const Vec& u) const { return quad_form(impl_->Q, u); }

double Discretization::quartic(const Vec& u, const Vec& phi) const {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += w_[k] * rho_[k] * phi[k] * u[k] * u[k];
  return s;
}

double Discretization::primitive(const Vec& u) const {
  const double p = prob_.p;
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] > 0) s += w_[k] * G_branch(inside_[k] != 0, K_[k], L_[k], p, u[k]);
  return s;
}

double Discretization::energy(const Vec& u, const Vec& phi) const {
  return 0.5 * quadratic(u) + 0.25 * quartic(u, phi) - primitive(u);
}

double Discretization::energy(const Vec& u) const { return energy(u, potential(u, u)); }

Vec Discretization::gradient(const Vec& u, const Vec& phi) const {
  const std::size_t n = size();
  const double p = prob_.p;
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd Qu = impl_->Q * x;
  Vec g(n);
  for (std::size_t k = 0; k < n; ++k)
    g[k] = Qu[static_cast<Eigen::Index>(k)] +
           w_[k] * (rho_[k] * phi[k] * u[k] - g_branch(inside_[k] != 0, K_[k], L_[k], p, u[k]));
  return g;
}

Vec Discretization::precondition(const Vec& r) const {
  Eigen::Map<const Eigen::VectorXd> x(r.data(), static_cast<Eigen::Index>(r.size()));
  Eigen::VectorXd z = impl_->chol.solve(x);
  return Vec(z.data(), z.data() + z.size());
}

double Discretization::fiber_maximizer(const Vec& u, double A, double B) const {
  const double p = prob_.p;
  // h(t) = (d/dt J(t u)) / t
  auto h = [&](double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (u[k] <= 0) continue;
      const double x = t * u[k];
      s += w_[k] * u[k] * u[k] * g_branch(inside_[k] != 0, K_[k], L_[k], p, x) / x;
    }
    return A + t * t * B - s;
  };
  if (!(A > 0)) throw SolverError("fiber map: nonpositive quadratic part");
  double lo = 1.0, hi = 1.0;
  double hlo = h(lo);
  if (hlo > 0) {
    int k = 0;
    do {
      lo = hi;
      hi *= 2;
      if (++k > 80) throw SolverError("fiber map: no maximum along the ray");
    } while (h(hi) > 0);
  } else {
    int k = 0;
    do {
      hi = lo;
      lo *= 0.5;
      if (++k > 200) throw SolverError("fiber map: no maximum along the ray");
    } while (h(lo) <= 0);
  }
  boost::uintmax_t it = 100;
  auto r = boost::math::tools::toms748_solve(h, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

// ---------------------------------------------------------------------------

double energy_J(const PenalizedProblem& prob, const CylField& u) {
  Discretization d(prob, u.grid_ptr(), false);
  return d.energy(u.values());
}

CylField grad_J(const PenalizedProblem& prob, const CylField& u) {
  Discretization d(prob, u.grid_ptr(), false);
  const Vec phi = d.potential(u.values(), u.values());
  const Vec g = d.gradient(u.values(), phi);
  CylField out(u.grid_ptr());
  for (std::size_t k = 0; k < g.size(); ++k) out.values()[k] = g[k] / d.weight()[k];
  return out;
}

double l2_inner(const CylField& f, const CylField& g) {
  const CylGrid& grid = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < grid.ns(); ++i)
    for (std::size_t j = 0; j < grid.nr(); ++j) s += f(i, j) * g(i, j) * grid.volume(i, j);
  return s * grid.mirror_factor();
}

double region_cutoff(const RegionLambda& region, double s, double r) {
  const double qs = s / region.a_s, qr = (r - region.r0) / region.a_r;
  const double q = qs * qs + qr * qr;
  if (q <= 0.25) return 1.0;
  if (q >= 1.0) return 0.0;
  const double x = (q - 0.25) / 0.75;
  const double a = std::exp(-1.0 / (1.0 - x)), b = std::exp(-1.0 / x);
  return a / (a + b);
}

CylField build_ansatz(const Discretization& disc, const GroundState2D& ground, CylPoint center,
                      bool cutoff) {
  const PenalizedProblem& prob = disc.problem();
  if (!prob.region.contains(center)) throw DomainError("ansatz centre outside the region");
  const CylGrid& g = disc.grid();
  const double eps = prob.par.eps;
  CylField u(disc.grid_ptr());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nr(); ++j) {
      const double s = g.s(i), r = g.r(j);
      const double d = cyl_distance({s, r}, center);
      const double eta = cutoff ? region_cutoff(prob.region, s, r) : 1.0;
      u(i, j) = eta == 0.0 ? 0.0 : eta * ground.value(d / eps);
    }
  const Vec phi = disc.potential(u.values(), u.values());
  const double A = disc.quadratic(u.values());
  const double B = disc.quartic(u.values(), phi);
  const double t = disc.fiber_maximizer(u.values(), A, B);
  for (double& x : u.values()) x *= t;
  const double J = disc.energy(u.values(), [&] {
    Vec p2 = phi;
    for (double& x : p2) x *= t * t;
    return p2;
  }());
  if (!std::isfinite(J)) throw SolverError("ansatz energy is not finite");
  return u;
}

CylField build_ansatz(const PenalizedProblem& prob, const GroundState2D& ground, CylPoint center,
                      std::shared_ptr<const CylGrid> grid, bool cutoff) {
  Discretization d(prob, std::move(grid), false);
  return build_ansatz(d, ground, center, cutoff);
}

// ---------------------------------------------------------------------------

namespace {

void refine_peak(const CylGrid& g, const CylField& u, std::size_t i, std::size_t j, double& s,
                 double& r) {
  auto vertex = [](double x0, double f0, double x1, double f1, double x2, double f2) {
    const double d1 = (f1 - f0) / (x1 - x0), d2 = (f2 - f1) / (x2 - x1);
    const double c = (d2 - d1) / (x2 - x0);
    if (!(c < 0)) return x1;
    return std::clamp(0.5 * (x0 + x1) - d1 / (2 * c), x0, x2);
  };
  s = g.s(i);
  r = g.r(j);
  if (j > 0 && j + 1 < g.nr())
    r = vertex(g.r(j - 1), u(i, j - 1), g.r(j), u(i, j), g.r(j + 1), u(i, j + 1));
  if (i + 1 < g.ns()) {
    if (i > 0) s = vertex(g.s(i - 1), u(i - 1, j), g.s(i), u(i, j), g.s(i + 1), u(i + 1, j));
    else if (g.even_in_s) s = vertex(-g.s(0), u(0, j), g.s(0), u(0, j), g.s(1), u(1, j));
  }
}

} // namespace

void fill_report(const Discretization& disc, SolveReport& rep) {
  const Vec& u = rep.u.values();
  const std::size_t n = u.size();
  const Vec phi = disc.potential(u, u);
  rep.phi = CylField(disc.grid_ptr());
  rep.phi.values() = phi;
  rep.eps = disc.problem().par.eps;
  rep.energy = disc.energy(u, phi);
  const Vec g = disc.gradient(u, phi);
  const Vec z = disc.precondition(g);
  const double un = disc.P_norm2(u);
  rep.residual = un > 0 ? std::sqrt(std::max(dot(g, z), 0.0) / un) : 0.0;

  std::size_t kmax = 0;
  double neg = 0.0, all = 0.0;
  const auto& w = disc.weight();
  const double p = disc.problem().p;
  rep.penalization_active = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (u[k] > u[kmax]) kmax = k;
    if (u[k] < 0) neg += w[k] * u[k] * u[k];
    all += w[k] * u[k] * u[k];
    if (!disc.inside(k) && u[k] > 0 && disc.K(k) * std::pow(u[k], p - 1) > disc.threshold(k))
      rep.penalization_active = true;
  }
  rep.u_max = u[kmax];
  rep.negative_part = all > 0 ? std::sqrt(neg / all) : 0.0;
  rep.positive = rep.u_max > 0 && rep.negative_part <= disc.problem().opts.negative_tol;
  const CylGrid& grid = disc.grid();
  refine_peak(grid, rep.u, kmax / grid.nr(), kmax % grid.nr(), rep.s_star, rep.r_star);
  rep.energy_norm = disc.quadratic(u);
  rep.interaction = 4 * kPi * disc.quartic(u, phi);
}

SolveReport descent_solve(const Discretization& disc, const CylField& initial) {
  const auto t_start = std::chrono::steady_clock::now();
  const SolverOptions& opt = disc.problem().opts;
  const std::size_t n = disc.size();
  if (initial.values().size() != n) throw DomainError("initial field does not match the grid");

  Vec u = initial.values();
  Vec phi = disc.potential(u, u);
  double J = disc.energy(u, phi);
  if (!(J > 0) || !std::isfinite(J))
    throw DomainError("descent needs an initial field with positive finite energy");
  {
    const double t = disc.fiber_maximizer(u, disc.quadratic(u), disc.quartic(u, phi));
    for (double& x : u) x *= t;
    for (double& x : phi) x *= t * t;
    J = disc.energy(u, phi);
  }

  SolveReport rep;
  Vec g_prev, z_prev, d_prev;
  int it = 0;
  int since_refresh = 0;
  bool fresh = true;
  for (;; ++it) {
    Vec g = disc.gradient(u, phi);
    Vec z = disc.precondition(g);
    const double gz = dot(g, z);
    const double res = std::sqrt(std::max(gz, 0.0) / disc.P_norm2(u));
    if (res <= opt.tol && !fresh) {
      // confirm with a recomputed potential
      phi = disc.potential(u, u);
      J = disc.energy(u, phi);
      fresh = true;
      since_refresh = 0;
      g = disc.gradient(u, phi);
      z = disc.precondition(g);
      continue;
    }
    rep.history.push_back(res);
    if (res <= opt.tol) break;
    if (it >= opt.max_iterations)
      throw SolverError("descent: iteration cap reached", rep.history);

    Vec d = z;
    if (opt.conjugate && !g_prev.empty()) {
      double num = 0.0;
      for (std::size_t k = 0; k < n; ++k) num += (g[k] - g_prev[k]) * z[k];
      const double beta = std::max(0.0, num / dot(g_prev, z_prev));
      for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + beta * d_prev[k];
      if (dot(g, d) <= 0) d = z;
    }
    const double gd = dot(g, d);

    const Vec phi_ud = disc.potential(u, d);
    const Vec phi_dd = disc.potential(d, d);
    const double Auu = disc.quadratic(u);
    double Aud = 0.0, Add = 0.0;
    {
      // bilinear form values from three quadratic evaluations
      Vec s(n);
      for (std::size_t k = 0; k < n; ++k) s[k] = u[k] + d[k];
      const double Apl = disc.quadratic(s);
      Add = disc.quadratic(d);
      Aud = 0.5 * (Apl - Auu - Add);
    }

    Vec v(n), phv(n);
    double t_last = 1.0;
    auto Phi = [&](double a) {
      for (std::size_t k = 0; k < n; ++k) {
        v[k] = u[k] - a * d[k];
        phv[k] = phi[k] - 2 * a * phi_ud[k] + a * a * phi_dd[k];
      }
      const double A = Auu - 2 * a * Aud + a * a * Add;
      const double B = disc.quartic(v, phv);
      double t;
      try {
        t = disc.fiber_maximizer(v, A, B);
      } catch (const SolverError&) {
        return std::numeric_limits<double>::infinity();
      }
      t_last = t;
      Vec tv(n);
      for (std::size_t k = 0; k < n; ++k) tv[k] = t * v[k];
      return 0.5 * t * t * A + 0.25 * t * t * t * t * B - disc.primitive(tv);
    };

    // bracket a minimum of the reduced energy along the line
    double a_lo = 0.0, a_mid = 1.0, a_hi;
    double f_mid = Phi(a_mid), f_hi;
    if (f_mid < J) {
      a_hi = 2.0;
      f_hi = Phi(a_hi);
      for (int k = 0; k < 12 && f_hi < f_mid; ++k) {
        a_lo = a_mid;
        a_mid = a_hi;
        f_mid = f_hi;
        a_hi *= 2;
        f_hi = Phi(a_hi);
      }
    } else {
      a_hi = a_mid;
      int k = 0;
      do {
        a_hi = a_mid;
        a_mid *= 0.5;
        f_mid = Phi(a_mid);
      } while (f_mid >= J - opt.armijo * a_mid * gd && ++k < 40);
      if (f_mid >= J) throw SolverError("descent: line search stagnated", rep.history);
    }
    auto best = boost::math::tools::brent_find_minima(Phi, a_lo, a_hi, 20);
    double alpha = best.first, f_new = best.second;
    if (!(f_new <= f_mid)) {
      alpha = a_mid;
      f_new = f_mid;
    }
    if (!(f_new < J))
      throw SolverError("descent: energy failed to decrease", rep.history);
    f_new = Phi(alpha);
    const double t = t_last;
    for (std::size_t k = 0; k < n; ++k) {
      u[k] = t * v[k];
      phi[k] = t * t * phv[k];
    }
    J = f_new;
    fresh = false;

    if (++since_refresh >= opt.refresh_every) {
      phi = disc.potential(u, u);
      J = disc.energy(u, phi);
      since_refresh = 0;
      fresh = true;
    }
    g_prev = std::move(g);
    z_prev = std::move(z);
    d_prev = std::move(d);
  }

  rep.iterations = it;
  rep.u = CylField(disc.grid_ptr());
  rep.u.values() = u;
  fill_report(disc, rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

SolveReport descent_solve(const PenalizedProblem& prob, const CylField& initial) {
  Discretization d(prob, initial.grid_ptr(), true);
  return descent_solve(d, initial);
}

double mountain_pass_level(const Discretization& disc, const CylField& u_star, int samples) {
  const Vec& u = u_star.values();
  const Vec phi = disc.potential(u, u);
  const double A = disc.quadratic(u), B = disc.quartic(u, phi);
  const std::size_t n = u.size();
  Vec tu(n);
  auto f = [&](double t) {
    for (std::size_t k = 0; k < n; ++k) tu[k] = t * u[k];
    return 0.5 * t * t * A + 0.25 * t * t * t * t * B - disc.primitive(tu);
  };
  double T = 2.0;
  while (f(T) >= 0) {
    T *= 2;
    if (T > 1e6) throw SolverError("mountain pass: no negative-energy endpoint");
  }
  double best = f(1.0), t_best = 1.0;
  for (int k = 1; k <= samples; ++k) {
    const double t = T * k / samples;
    const double v = f(t);
    if (v > best) {
      best = v;
      t_best = t;
    }
  }
  const double h = T / samples;
  auto r = boost::math::tools::brent_find_minima([&](double t) { return -f(t); },
                                                 std::max(0.0, t_best - h), t_best + h, 40);
  return std::max(best, -r.second);
}

OriginalCheck verify_original(const Discretization& disc, const SolveReport& rep) {
  OriginalCheck out;
  out.margin = CylField(disc.grid_ptr());
  const Vec& u = rep.u.values();
  const double p = disc.problem().p;
  out.flag = true;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (disc.inside(k)) continue;
    const double up = std::max(u[k], 0.0);
    const double m = disc.threshold(k) - disc.K(k) * std::pow(up, p - 1);
    out.margin.values()[k] = m;
    out.min_margin = std::min(out.min_margin, m);
    if (m < 0) out.flag = false;
  }
  return out;
}

OriginalCheck verify_original(const PenalizedProblem& prob, const SolveReport& rep) {
  Discretization d(prob, rep.u.grid_ptr(), false);
  return verify_original(d, rep);
}

// ---------------------------------------------------------------------------

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["eps"] = eps;
  j["energy"] = energy;
  j["residual"] = residual;
  j["iterations"] = iterations;
  j["history"] = history;
  j["s_star"] = s_star;
  j["r_star"] = r_star;
  j["u_max"] = u_max;
  j["c_eps"] = c_eps;
  j["positive"] = positive;
  j["negative_part"] = negative_part;
  j["penalization_active"] = penalization_active;
  j["energy_norm"] = energy_norm;
  j["interaction"] = interaction;
  j["seconds"] = seconds;
  return j.dump(2);
}

void SolveReport::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir + "/report.json");
    if (!os) throw ConfigError("cannot write " + dir + "/report.json");
    os << to_json() << '\n';
  }
  write_field(dir + "/u.grid", u);
  write_field(dir + "/phi.grid", phi);
}

} // namespace cylsp
