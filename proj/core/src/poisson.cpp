#include "cylsp/poisson.hpp"

#include "cylsp/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace cylsp {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(const CylField& f, const char* what) {
  for (double x : f.values())
    if (x < 0) throw DomainError(std::string(what) + " has a negative entry");
}

void require_same_grid(const CylField& a, const CylField& b) {
  if (a.grid_ptr() == b.grid_ptr()) return;
  const CylGrid &x = a.grid(), &y = b.grid();
  if (x.s_faces != y.s_faces || x.r_faces != y.r_faces || x.even_in_s != y.even_in_s)
    throw DomainError("fields live on different grids");
}

// 2x2 Gauss average of the kernel over source cell c seen from (s, r)
double self_average(const CylGrid& g, std::size_t ic, std::size_t jc, double s, double r) {
  const double q = 0.5 / std::sqrt(3.0);
  const double rc = g.r(jc), sc = g.s(ic);
  double acc = 0.0;
  for (int a = -1; a <= 1; a += 2)
    for (int b = -1; b <= 1; b += 2) {
      const double rp = rc + a * q * g.dr(jc);
      const double sp = sc + b * q * g.ds(ic);
      acc += rp / rc * ring_kernel(r, rp, s - sp);
    }
  return 0.25 * acc;
}

} // namespace

double elliptic_K_complement(double m1) {
  if (!(m1 > 0.0) || m1 > 1.0) throw DomainError("elliptic K needs 0 <= m < 1");
  double a = 1.0, b = std::sqrt(m1);
  for (int it = 0; it < 64 && std::abs(a - b) > 1e-16 * a; ++it) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2 * a);
}

double ring_kernel(double r, double rp, double ds) {
  if (r < 0 || rp < 0) throw DomainError("ring kernel needs nonnegative radii");
  const double A = (r + rp) * (r + rp) + ds * ds;
  const double m1 = ((r - rp) * (r - rp) + ds * ds) / A;
  if (!(A > 0) || !(m1 > 0)) throw DomainError("ring kernel evaluated on its own ring");
  return elliptic_K_complement(m1) / (2 * kPi * kPi * std::sqrt(A));
}

double cell_kernel(const CylGrid& g, std::size_t t, std::size_t c) {
  const std::size_t nr = g.nr();
  const std::size_t it = t / nr, jt = t % nr, ic = c / nr, jc = c % nr;
  const double st = g.s(it), rt = g.r(jt), sc = g.s(ic), rc = g.r(jc);
  double k = t == c ? self_average(g, ic, jc, st, rt) : ring_kernel(rt, rc, st - sc);
  if (g.even_in_s) k += ring_kernel(rt, rc, st + sc);
  return k;
}

CylField newtonian_potential(const CylField& source) {
  require_nonnegative(source, "source");
  const CylGrid& g = source.grid();
  const std::size_t n = g.size(), nr = g.nr();
  std::vector<double> m(n);
  for (std::size_t c = 0; c < n; ++c) m[c] = source.values()[c] * g.volume(c / nr, c % nr);
  CylField phi(source.grid_ptr());
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (m[c] != 0.0) acc += cell_kernel(g, t, c) * m[c];
    phi.values()[t] = acc;
  }
  return phi;
}

double potential_at(const CylField& source, double s, double r) {
  require_nonnegative(source, "source");
  const CylGrid& g = source.grid();
  r = std::abs(r);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nr(); ++j) {
      const double f = source(i, j);
      if (f == 0.0) continue;
      const double sc = g.s(i), rc = g.r(j);
      double k = (sc == s && rc == r) ? self_average(g, i, j, s, r) : ring_kernel(r, rc, s - sc);
      if (g.even_in_s) k += ring_kernel(r, rc, s + sc);
      acc += k * f * g.volume(i, j);
    }
  return acc;
}

double interaction_energy(const CylField& f, const CylField& g) {
  require_same_grid(f, g);
  require_nonnegative(f, "f");
  require_nonnegative(g, "g");
  const CylGrid& grid = f.grid();
  const std::size_t n = grid.size(), nr = grid.nr();
  std::vector<double> mf(n), mg(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double v = grid.volume(c / nr, c % nr);
    mf[c] = f.values()[c] * v;
    mg[c] = g.values()[c] * v;
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (mf[t] == 0.0) continue;
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (mg[c] != 0.0) row += cell_kernel(grid, t, c) * mg[c];
    acc += mf[t] * row;
  }
  return 4 * kPi * grid.mirror_factor() * acc;
}

double poisson_residual(const CylField& phi, const CylField& source) {
  require_same_grid(phi, source);
  const CylGrid& g = phi.grid();
  const std::size_t ns = g.ns(), nr = g.nr();
  const bool axis = g.r_faces.front() == 0.0;
  double num = 0.0, den = 0.0, alt = 0.0;
  for (std::size_t i = 0; i + 1 < ns; ++i) {
    if (i == 0 && !g.even_in_s) continue;
    for (std::size_t j = 0; j + 1 < nr; ++j) {
      if (j == 0 && !axis) continue;
      const double rj = g.r(j), dsi = g.ds(i), drj = g.dr(j);
      const double u = phi(i, j);
      double flux = 0.0;
      flux += g.r_faces[j + 1] * dsi * (phi(i, j + 1) - u) / (g.r(j + 1) - rj);
      if (j > 0) flux -= g.r_faces[j] * dsi * (u - phi(i, j - 1)) / (rj - g.r(j - 1));
      flux += rj * drj * (phi(i + 1, j) - u) / (g.s(i + 1) - g.s(i));
      if (i > 0) flux -= rj * drj * (u - phi(i - 1, j)) / (g.s(i) - g.s(i - 1));
      const double lap = flux / (rj * dsi * drj);
      const double res = -lap - source(i, j);
      const double v = g.volume(i, j);
      num += res * res * v;
      den += source(i, j) * source(i, j) * v;
      alt += u * u * v;
    }
  }
  if (den > 0) return std::sqrt(num / den);
  if (alt > 0) return std::sqrt(num / alt);
  return 0.0;
}

// ---------------------------------------------------------------------------

KernelMatrix::KernelMatrix(std::shared_ptr<const CylGrid> grid)
    : grid_(std::move(grid)), n_(grid_->size()) {
  const CylGrid& g = *grid_;
  G_.assign(n_ * n_, 0.0);
  vol_.resize(n_);
  for (std::size_t t = 0; t < n_; ++t) {
    vol_[t] = g.volume(t / g.nr(), t % g.nr());
    for (std::size_t c = t; c < n_; ++c) {
      const double k = cell_kernel(g, t, c);
      G_[t * n_ + c] = k;
      G_[c * n_ + t] = k;
    }
  }
}

void KernelMatrix::potential(const double* f, double* phi) const {
  Eigen::Map<const Eigen::MatrixXd> G(G_.data(), static_cast<Eigen::Index>(n_),
                                      static_cast<Eigen::Index>(n_));
  Eigen::Map<const Eigen::VectorXd> fv(f, static_cast<Eigen::Index>(n_));
  Eigen::Map<const Eigen::VectorXd> vv(vol_.data(), static_cast<Eigen::Index>(n_));
  Eigen::Map<Eigen::VectorXd> out(phi, static_cast<Eigen::Index>(n_));
  out.noalias() = G * fv.cwiseProduct(vv);
}

std::vector<double> KernelMatrix::potential(const std::vector<double>& f) const {
  if (f.size() != n_) throw DomainError("kernel matrix size mismatch");
  std::vector<double> phi(n_);
  potential(f.data(), phi.data());
  return phi;
}

} // namespace cylsp
