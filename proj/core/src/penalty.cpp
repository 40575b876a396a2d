#include "cylsp/penalty.hpp"

#include "cylsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cylsp {

void PenalizationParams::validate() const {
  if (!(eps > 0)) throw InvariantViolation("eps must be positive");
  if (!(kappa > 0 && kappa < 0.25)) throw InvariantViolation("kappa must lie in (0, 1/4)");
  if (!(beta > 0)) throw InvariantViolation("beta must be positive");
  if (!(mu > 0 && mu < 1)) throw InvariantViolation("mu must lie in (0, 1)");
}

double hardy_potential(const PenalizationParams& par, double s, double r) {
  const double n2 = s * s + r * r;
  if (!(n2 > 0)) throw DomainError("H is singular at the origin");
  const double L = 0.5 * std::log(n2);
  return par.kappa / (n2 * std::pow(L * L + 1, 0.5 * (1 + par.beta)));
}

HardyCheck hardy_positivity_check(const CylField& u, const PenalizationParams& par,
                                  double rel_slack) {
  const CylGrid& g = u.grid();
  const std::size_t ns = g.ns(), nr = g.nr();
  const double mf = g.mirror_factor();
  constexpr double two_pi = 2 * std::numbers::pi;
  double grad = 0.0, hu = 0.0, w = 0.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nr; ++j) {
      const double v = u(i, j);
      const double rj = g.r(j);
      // s-edge to the next cell (or to the zero exterior)
      {
        const double area = two_pi * rj * g.dr(j);
        const double dist = i + 1 < ns ? g.s(i + 1) - g.s(i) : g.s_faces[i + 1] - g.s(i);
        const double nb = i + 1 < ns ? u(i + 1, j) : 0.0;
        grad += area / dist * (nb - v) * (nb - v);
        if (i == 0 && !g.even_in_s) grad += area / (g.s(0) - g.s_faces[0]) * v * v;
      }
      {
        const double tau = g.r_faces[j + 1];
        const double area = two_pi * tau * g.ds(i);
        const double dist = j + 1 < nr ? g.r(j + 1) - rj : g.r_faces[j + 1] - rj;
        const double nb = j + 1 < nr ? u(i, j + 1) : 0.0;
        grad += area / dist * (nb - v) * (nb - v);
        if (j == 0 && g.r_faces[0] > 0)
          grad += two_pi * g.r_faces[0] * g.ds(i) / (rj - g.r_faces[0]) * v * v;
      }
      const double s = g.s(i);
      const double vol = g.volume(i, j);
      const double n2 = s * s + rj * rj;
      hu += hardy_potential(par, s, rj) * v * v * vol;
      w += v * v / n2 * vol;
    }
  HardyCheck h;
  h.gradient = mf * grad;
  h.lhs = mf * (grad - hu);
  h.rhs = (0.25 - par.kappa) * mf * w;
  h.pass = h.lhs >= h.rhs - rel_slack * h.gradient;
  return h;
}

double penalty_threshold(const PotentialSpec& spec, const PenalizationParams& par, double s,
                         double r) {
  return par.eps * par.eps * hardy_potential(par, s, r) + par.mu * spec.V(s, r);
}

double g_branch(bool inside, double K, double L, double p, double t) {
  if (t <= 0) return 0.0;
  const double pw = K * std::pow(t, p);
  return inside ? pw : std::min(L * t, pw);
}

double G_branch(bool inside, double K, double L, double p, double t) {
  if (t <= 0) return 0.0;
  if (inside || K <= 0) return inside ? K * std::pow(t, p + 1) / (p + 1) : 0.0;
  const double sc = std::pow(L / K, 1.0 / (p - 1));
  if (t <= sc) return K * std::pow(t, p + 1) / (p + 1);
  return K * std::pow(sc, p + 1) / (p + 1) + 0.5 * L * (t * t - sc * sc);
}

double penalized_g(const PotentialSpec& spec, const RegionLambda& region,
                   const PenalizationParams& par, double p, double s, double r, double t) {
  if (t <= 0) return 0.0;
  const bool inside = region.contains({s, r});
  const double K = spec.K(s, r);
  const double L = inside ? 0.0 : penalty_threshold(spec, par, s, r);
  return g_branch(inside, K, L, p, t);
}

double penalized_G(const PotentialSpec& spec, const RegionLambda& region,
                   const PenalizationParams& par, double p, double s, double r, double t) {
  if (t <= 0) return 0.0;
  const bool inside = region.contains({s, r});
  const double K = spec.K(s, r);
  const double L = inside ? 0.0 : penalty_threshold(spec, par, s, r);
  return G_branch(inside, K, L, p, t);
}

double effective_W(const PotentialSpec& spec, double s, double r) {
  return spec.V(s, r) + spec.rho(s, r) / (1 + std::hypot(s, r));
}

double effective_W_eps(const PotentialSpec& spec, const PenalizationParams& par, double C,
                       double C_prime, double s, double r) {
  return (1 - par.mu) * spec.V(s, r) + C * spec.rho(s, r) / (C_prime + std::hypot(s, r));
}

EnvelopeCase parse_envelope_case(const std::string& tag) {
  if (tag == "base") return EnvelopeCase::Base;
  if (tag == "inf-quadratic") return EnvelopeCase::InfinityQuadratic;
  if (tag == "inf-subquadratic") return EnvelopeCase::InfinitySubquadratic;
  if (tag == "zero-quadratic") return EnvelopeCase::OriginQuadratic;
  if (tag == "zero-superquadratic") return EnvelopeCase::OriginSuperquadratic;
  throw DomainError("unknown envelope case '" + tag + "'");
}

double decay_envelope(EnvelopeCase c, const EnvelopeConstants& k, double eps, CylPoint x,
                      CylPoint circle) {
  if (!(k.C > 0) || !(k.lambda > 0) || !(eps > 0))
    throw DomainError("envelope constants must be positive");
  const double d = cyl_distance(x, circle);
  const double z = d / (1 + d);
  const double n = norm3(x);
  const double a = k.lambda / eps;
  switch (c) {
    case EnvelopeCase::Base:
      return k.C * std::exp(-a * z) / (1 + n);
    case EnvelopeCase::InfinityQuadratic:
      return k.C * std::exp(-a * z) * std::pow(1 + n, -k.nu / eps);
    case EnvelopeCase::InfinitySubquadratic:
      return k.C * std::exp(-a * z * std::pow(1 + n, 0.5 * (2 - k.exponent)));
    case EnvelopeCase::OriginQuadratic:
      return k.C * std::exp(-a * z) * std::pow(n / (1 + n), k.nu / eps);
    case EnvelopeCase::OriginSuperquadratic:
      return k.C * std::exp(-a * z * std::pow(n / (1 + n), 0.5 * (k.exponent - 2)));
  }
  throw DomainError("unknown envelope case");
}

double cosh_barrier(double lambda, double R, double eps, CylPoint x, CylPoint center) {
  return std::cosh(lambda * (R - cyl_distance(x, center)) / eps);
}

} // namespace cylsp
