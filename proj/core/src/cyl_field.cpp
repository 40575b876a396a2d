#include "cylsp/cyl_field.hpp"

#include "cylsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cylsp {

CylGrid CylGrid::uniform(double s_min, double h_s, std::size_t ns, double h_r, std::size_t nr,
                         bool even_in_s) {
  CylGrid g;
  g.even_in_s = even_in_s;
  g.s_faces.resize(ns + 1);
  g.r_faces.resize(nr + 1);
  for (std::size_t i = 0; i <= ns; ++i) g.s_faces[i] = s_min + static_cast<double>(i) * h_s;
  for (std::size_t j = 0; j <= nr; ++j) g.r_faces[j] = static_cast<double>(j) * h_r;
  g.validate();
  return g;
}

double CylGrid::volume(std::size_t i, std::size_t j) const {
  return 2 * std::numbers::pi * r(j) * ds(i) * dr(j);
}

void CylGrid::validate() const {
  if (s_faces.size() < 2 || r_faces.size() < 2) throw InvariantViolation("grid needs a cell");
  for (std::size_t i = 1; i < s_faces.size(); ++i)
    if (!(s_faces[i] > s_faces[i - 1])) throw InvariantViolation("s faces not increasing");
  for (std::size_t j = 1; j < r_faces.size(); ++j)
    if (!(r_faces[j] > r_faces[j - 1])) throw InvariantViolation("r faces not increasing");
  if (r_faces[0] < 0) throw InvariantViolation("r faces below the axis");
  if (even_in_s && s_faces[0] != 0.0) throw InvariantViolation("even grid must start at s = 0");
}

CylField::CylField(std::shared_ptr<const CylGrid> grid, double fill)
    : grid_(std::move(grid)), v_(grid_->size(), fill) {}

namespace {

// bracketing centres for bilinear interpolation
void locate(const std::vector<double>& faces, double x, std::size_t& k, double& t) {
  const std::size_t n = faces.size() - 1;
  auto c = [&](std::size_t i) { return 0.5 * (faces[i] + faces[i + 1]); };
  if (n == 1 || x <= c(0)) {
    k = 0;
    t = 0.0;
    return;
  }
  if (x >= c(n - 1)) {
    k = n - 2;
    t = 1.0;
    return;
  }
  auto it = std::upper_bound(faces.begin(), faces.end(), x);
  std::size_t i = static_cast<std::size_t>(it - faces.begin()) - 1;  // cell holding x
  if (x < c(i)) --i;
  k = std::min(i, n - 2);
  t = (x - c(k)) / (c(k + 1) - c(k));
}

} // namespace

double CylField::sample(double s, double r) const {
  const CylGrid& g = *grid_;
  if (g.even_in_s) s = std::abs(s);
  r = std::abs(r);
  if (s < g.s_faces.front() || s > g.s_faces.back() || r > g.r_faces.back()) return 0.0;
  std::size_t i, j;
  double ts, tr;
  locate(g.s_faces, s, i, ts);
  locate(g.r_faces, r, j, tr);
  if (g.ns() == 1) ts = 0.0;
  if (g.nr() == 1) tr = 0.0;
  const std::size_t i1 = std::min(i + 1, g.ns() - 1), j1 = std::min(j + 1, g.nr() - 1);
  const double a = (*this)(i, j) * (1 - tr) + (*this)(i, j1) * tr;
  const double b = (*this)(i1, j) * (1 - tr) + (*this)(i1, j1) * tr;
  return a * (1 - ts) + b * ts;
}

double CylField::integral() const {
  const CylGrid& g = *grid_;
  double s = 0.0;
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nr(); ++j) s += (*this)(i, j) * g.volume(i, j);
  return s * g.mirror_factor();
}

void CylField::validate() const {
  for (double x : v_)
    if (!std::isfinite(x)) throw InvariantViolation("field holds a non-finite value");
}

void write_field(const std::string& path, const CylField& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os.precision(17);
  const CylGrid& g = f.grid();
  os << "# cylsp-field ns " << g.ns() << " nr " << g.nr() << " even " << (g.even_in_s ? 1 : 0)
     << '\n';
  os << "s_faces";
  for (double x : g.s_faces) os << ' ' << x;
  os << "\nr_faces";
  for (double x : g.r_faces) os << ' ' << x;
  os << '\n';
  for (std::size_t i = 0; i < g.ns(); ++i) {
    for (std::size_t j = 0; j < g.nr(); ++j) os << (j ? " " : "") << f(i, j);
    os << '\n';
  }
}

CylField read_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  std::string tag, k1, k2, k3;
  std::size_t ns = 0, nr = 0;
  int even = 0;
  is >> tag >> tag >> k1 >> ns >> k2 >> nr >> k3 >> even;
  if (!is || k1 != "ns" || k2 != "nr" || k3 != "even") throw ConfigError(path + ": bad header");
  auto g = std::make_shared<CylGrid>();
  g->even_in_s = even != 0;
  g->s_faces.resize(ns + 1);
  g->r_faces.resize(nr + 1);
  is >> tag;
  for (auto& x : g->s_faces) is >> x;
  is >> tag;
  for (auto& x : g->r_faces) is >> x;
  if (!is) throw ConfigError(path + ": bad face lists");
  g->validate();
  CylField f(g);
  for (auto& x : f.values()) is >> x;
  if (!is) throw ConfigError(path + ": truncated values");
  return f;
}

} // namespace cylsp
