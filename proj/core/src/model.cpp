#include "cylsp/model.hpp"

#include "cylsp/errors.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <sstream>

namespace cylsp {

namespace {

template <class... Ts> struct Overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double poly_value(const RingPolyTerm& t, double s, double r) {
  if (t.window) {
    s = std::clamp(s, t.window->s_min, t.window->s_max);
    r = std::clamp(r, t.window->r_min, t.window->r_max);
  }
  const double y = r - t.r0;
  double total = 0.0;
  double s_pow = 1.0;
  for (const auto& row : t.coeffs) {
    double y_pow = 1.0;
    for (double a : row) {
      total += a * s_pow * y_pow;
      y_pow *= y;
    }
    s_pow *= s;
  }
  return t.c * total;
}

int poly_degree(const RingPolyTerm& t) {
  int deg = 0;
  for (std::size_t i = 0; i < t.coeffs.size(); ++i)
    for (std::size_t j = 0; j < t.coeffs[i].size(); ++j)
      if (t.coeffs[i][j] != 0.0) deg = std::max(deg, static_cast<int>(i + j));
  return deg;
}

double bump_value(const CompactBumpTerm& t, double norm) {
  const double mid = 0.5 * (t.inner + t.outer);
  const double half = 0.5 * (t.outer - t.inner);
  const double z = (norm - mid) / half;
  if (std::abs(z) >= 1.0) return 0.0;
  return t.c * std::exp(1.0 - 1.0 / (1.0 - z * z));
}

double term_value(const Term& term, double s, double r) {
  return std::visit(
      Overloaded{
          [](const ConstantTerm& t) { return t.c; },
          [&](const AxisPowerTerm& t) {
            const double n = std::hypot(s, r);
            if (n == 0.0) {
              if (t.q < 0.0)
                throw DomainError("axis-power term with negative exponent evaluated at the origin");
              return t.q == 0.0 ? t.c : 0.0;
            }
            return t.c * std::pow(n, t.q);
          },
          [&](const RingPolyTerm& t) { return poly_value(t, s, r); },
          [&](const GaussianTerm& t) {
            const double ds = s - t.s0, dr = r - t.r0;
            return t.c * std::exp(-(ds * ds + dr * dr) / (t.width * t.width));
          },
          [&](const CompactBumpTerm& t) { return bump_value(t, std::hypot(s, r)); },
          [&](const CallableTerm& t) { return t.fn(s, r); },
      },
      term);
}

Asymptotics vanishing_at_infinity() { return {kNegInf, std::nullopt}; }
Asymptotics vanishing_at_origin() { return {kInfinity, std::nullopt}; }
Asymptotics bounded_positive() { return {0.0, 0.0}; }

// Minimum of a windowed polynomial over the edges that clamped points reach
// as |x| -> infinity in the half-plane r >= 0: s = s_min, s = s_max, r = r_max.
double asymptotic_edge_min(const RingPolyTerm& t) {
  const Window& w = *t.window;
  constexpr int n = 4001;
  double m = kInfinity;
  for (int k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) / (n - 1);
    const double r = w.r_min + a * (w.r_max - w.r_min);
    const double s = w.s_min + a * (w.s_max - w.s_min);
    m = std::min({m, poly_value(t, w.s_min, r), poly_value(t, w.s_max, r),
                  poly_value(t, s, w.r_max)});
  }
  return m;
}

TermAsymptotics term_asymptotics(const Term& term) {
  TermAsymptotics out;
  std::visit(
      Overloaded{
          [&](const ConstantTerm& t) {
            if (t.c > 0.0) {
              out.at_infinity = bounded_positive();
              out.at_origin = bounded_positive();
            } else {
              out.at_infinity = vanishing_at_infinity();
              out.at_origin = vanishing_at_origin();
            }
          },
          [&](const AxisPowerTerm& t) {
            if (t.c > 0.0) {
              out.at_infinity = {t.q, t.q};
              out.at_origin = {t.q, t.q};
            } else {
              out.at_infinity = vanishing_at_infinity();
              out.at_origin = vanishing_at_origin();
            }
          },
          [&](const RingPolyTerm& t) {
            const int deg = poly_degree(t);
            if (!t.window && deg > 0) {
              out.classifiable = false;
              out.reason = "ring polynomial without window has direction-dependent growth";
              return;
            }
            if (!t.window) {  // degree zero: a constant
              const double v = poly_value(t, 0.0, 0.0);
              out.at_infinity = v > 0.0 ? bounded_positive() : vanishing_at_infinity();
              out.at_origin = v > 0.0 ? bounded_positive() : vanishing_at_origin();
              return;
            }
            out.at_infinity.upper = 0.0;
            if (asymptotic_edge_min(t) > 0.0) out.at_infinity.lower = 0.0;
            out.at_origin.upper = 0.0;
            if (poly_value(t, 0.0, 0.0) > 0.0) out.at_origin.lower = 0.0;
          },
          [&](const GaussianTerm& t) {
            out.at_infinity = vanishing_at_infinity();
            out.at_origin = t.c > 0.0 ? bounded_positive() : vanishing_at_origin();
          },
          [&](const CompactBumpTerm&) {
            out.at_infinity = vanishing_at_infinity();
            out.at_origin = vanishing_at_origin();
          },
          [&](const CallableTerm&) {
            out.classifiable = false;
            out.reason = "callable term has no symbolic asymptotics";
          },
      },
      term);
  return out;
}

std::optional<double> max_opt(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

std::optional<double> min_opt(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

} // namespace

double cyl_distance(CylPoint x, CylPoint y) { return std::hypot(x.s - y.s, x.r - y.r); }

// ---------------------------------------------------------------------------

double PotentialField::operator()(double s, double r) const {
  double total = 0.0;
  for (const auto& t : terms_) total += term_value(t, s, r);
  return total;
}

bool PotentialField::identically_zero() const {
  for (const auto& t : terms_) {
    const bool zero = std::visit(
        Overloaded{
            [](const ConstantTerm& t) { return t.c == 0.0; },
            [](const AxisPowerTerm& t) { return t.c == 0.0; },
            [](const RingPolyTerm& t) {
              if (t.c == 0.0) return true;
              for (const auto& row : t.coeffs)
                for (double a : row)
                  if (a != 0.0) return false;
              return true;
            },
            [](const GaussianTerm& t) { return t.c == 0.0; },
            [](const CompactBumpTerm& t) { return t.c == 0.0 || t.outer <= t.inner; },
            [](const CallableTerm&) { return false; },
        },
        t);
    if (!zero) return false;
  }
  return true;
}

bool PotentialField::singular_at_origin() const {
  for (const auto& t : terms_)
    if (const auto* ap = std::get_if<AxisPowerTerm>(&t); ap && ap->c != 0.0 && ap->q < 0.0)
      return true;
  return false;
}

TermAsymptotics PotentialField::asymptotics() const {
  TermAsymptotics sum;
  sum.at_infinity = vanishing_at_infinity();
  sum.at_origin = vanishing_at_origin();
  for (const auto& t : terms_) {
    const TermAsymptotics a = term_asymptotics(t);
    if (!a.classifiable) return a;
    sum.at_infinity.upper = std::max(sum.at_infinity.upper, a.at_infinity.upper);
    sum.at_infinity.lower = max_opt(sum.at_infinity.lower, a.at_infinity.lower);
    sum.at_origin.upper = std::min(sum.at_origin.upper, a.at_origin.upper);
    sum.at_origin.lower = min_opt(sum.at_origin.lower, a.at_origin.lower);
  }
  return sum;
}

void PotentialSpec::validate() const {
  if (K.identically_zero()) throw InvariantViolation("K must not vanish identically");
}

PotentialValues eval_potentials(const PotentialSpec& spec, double s, double r) {
  if (!(r >= 0.0)) throw DomainError("eval_potentials: r must be nonnegative");
  PotentialValues v{spec.V(s, r), spec.K(s, r), spec.rho(s, r)};
  if (v.V < 0.0 || v.K < 0.0 || v.rho < 0.0) {
    std::ostringstream os;
    os << "negative potential value at (s, r) = (" << s << ", " << r << "): V=" << v.V
       << " K=" << v.K << " rho=" << v.rho;
    throw InvariantViolation(os.str());
  }
  return v;
}

// ---------------------------------------------------------------------------

void RegionLambda::validate() const {
  if (!(a_s > 0.0 && a_r > 0.0)) throw InvariantViolation("region half-widths must be positive");
  if (!(r0 - a_r > 0.0)) throw InvariantViolation("region closure must avoid the axis (r0 - a_r > 0)");
}

bool RegionLambda::contains(CylPoint x) const {
  const double zs = x.s / a_s, zr = (x.r - r0) / a_r;
  return zs * zs + zr * zr < 1.0;
}

double RegionLambda::distance_to_boundary(CylPoint x) const {
  // Parametrize the boundary by angle; sample, then polish with Brent.
  auto dist = [&](double t) {
    return std::hypot(x.s - a_s * std::sin(t), x.r - (r0 + a_r * std::cos(t)));
  };
  constexpr int n = 720;
  const double step = 2.0 * M_PI / n;
  int best = 0;
  double best_d = kInfinity;
  for (int k = 0; k < n; ++k) {
    const double d = dist(k * step);
    if (d < best_d) best_d = d, best = k;
  }
  const auto res = boost::math::tools::brent_find_minima(
      dist, (best - 1) * step, (best + 1) * step, 40);
  return std::min(best_d, res.second);
}

// ---------------------------------------------------------------------------

GrowthClass classify_growth(const PotentialSpec& spec, double p) {
  if (!(p > 3.0)) throw DomainError("classify_growth: p must exceed 3");
  GrowthClass g;

  const TermAsymptotics V = spec.V.asymptotics();
  const TermAsymptotics K = spec.K.asymptotics();
  const TermAsymptotics rho = spec.rho.asymptotics();
  for (const auto* a : {&V, &K, &rho}) {
    if (!a->classifiable) {
      g.classifiable = false;
      g.reason = a->reason;
      return g;
    }
  }

  // W = V + rho/(1+|x|): the weight shifts the rho exponents by -1 at infinity
  // and leaves them unchanged at the origin.
  std::optional<double> W_lower_inf = V.at_infinity.lower;
  if (rho.at_infinity.lower) W_lower_inf = max_opt(W_lower_inf, *rho.at_infinity.lower - 1.0);

  const double K_up_inf = K.at_infinity.upper;
  const bool K_power_bounded_inf = K_up_inf < kInfinity;

  g.sigma = K_up_inf;
  g.G1_inf = K_up_inf < p - 3.0;
  g.G2_inf = W_lower_inf && *W_lower_inf >= -2.0 && K_power_bounded_inf;
  g.G3_inf = W_lower_inf && *W_lower_inf > -2.0 && K_power_bounded_inf;
  if (g.G3_inf) g.alpha = -*W_lower_inf;

  const double K_up_0 = K.at_origin.upper;
  const std::optional<double> V_lower_0 = V.at_origin.lower;
  g.tau = K_up_0;
  g.G1_0 = K_up_0 > -2.0;
  g.G2_0 = V_lower_0 && *V_lower_0 <= -2.0 && K_up_0 > kNegInf;
  g.G3_0 = V_lower_0 && *V_lower_0 < -2.0;
  if (g.G3_0) g.gamma = -*V_lower_0;
  return g;
}

// ---------------------------------------------------------------------------

double auxiliary_potential_M(const PotentialSpec& spec, double E11, double p,
                             double s, double r) {
  const PotentialValues v = eval_potentials(spec, s, r);
  if (v.K == 0.0) return kInfinity;
  const double ea = (p + 1.0) / (p - 1.0) - 1.0;
  const double eb = -2.0 / (p - 1.0);
  return E11 * r * std::pow(v.V, ea) * std::pow(v.K, eb);
}

double concentration_functional_A(const PotentialSpec& spec, double p, double s,
                                  double r) {
  const PotentialValues v = eval_potentials(spec, s, r);
  if (v.K == 0.0) return kInfinity;
  const double ea = (p + 1.0) / (p - 1.0) - 1.5;
  const double eb = -2.0 / (p - 1.0);
  return std::pow(v.V, ea) * std::pow(v.K, eb);
}

RingMinimum minimize_M_on_ring(const PotentialSpec& spec, double E11, double p,
                               const RegionLambda& region, int samples) {
  region.validate();
  if (samples < 3) throw DomainError("minimize_M_on_ring: need at least 3 samples");
  const double lo = region.r0 - region.a_r;
  const double hi = region.r0 + region.a_r;
  auto M = [&](double r) { return auxiliary_potential_M(spec, E11, p, 0.0, r); };

  const double step = (hi - lo) / (samples - 1);
  int best = -1;
  double best_v = kInfinity;
  for (int k = 0; k < samples; ++k) {
    const double v = M(lo + k * step);
    if (v < best_v) best_v = v, best = k;
  }
  if (best < 0) throw NoMinimizerError("M is +infinity on the whole slice");

  RingMinimum out;
  out.r_star = lo + best * step;
  out.value = best_v;
  if (best > 0 && best < samples - 1) {
    const auto res = boost::math::tools::brent_find_minima(
        M, lo + (best - 1) * step, lo + (best + 1) * step, 52);
    if (res.second < out.value) {
      out.r_star = res.first;
      out.value = res.second;
    }
  }
  out.boundary_value = std::min(M(lo), M(hi));
  out.interior = out.value > 0.0 && out.value < out.boundary_value;

  // inf over the whole region on an (s, r) lattice clipped to the ellipse.
  double inf_region = out.value;
  const int n2 = std::max(51, samples / 10);
  for (int i = 0; i < n2; ++i) {
    const double s = -region.a_s + 2.0 * region.a_s * (i + 0.5) / n2;
    for (int j = 0; j < n2; ++j) {
      const double r = lo + (hi - lo) * (j + 0.5) / n2;
      if (!region.contains({s, r})) continue;
      inf_region = std::min(inf_region, auxiliary_potential_M(spec, E11, p, s, r));
    }
  }
  out.inf_over_region = inf_region;
  out.below_twice_inf = out.value < 2.0 * inf_region;
  return out;
}

} // namespace cylsp
