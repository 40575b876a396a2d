#pragma once

// Penalized nonlinearity, the Hardy-type potential H, effective potentials
// and the decay envelopes used to test computed solutions.

#include "cylsp/cyl_field.hpp"
#include "cylsp/model.hpp"

#include <string>

namespace cylsp {

struct PenalizationParams {
  double eps = 0.1;
  double kappa = 0.1;  // in (0, 1/4)
  double beta = 1.0;
  double mu = 0.1;     // in (0, 1)

  void validate() const;
};

/// κ / (|x|² (log²|x| + 1)^{(1+β)/2}). Throws DomainError at the origin.
double hardy_potential(const PenalizationParams& par, double s, double r);
inline double hardy_potential(const PenalizationParams& par, CylPoint x) {
  return hardy_potential(par, x.s, x.r);
}

struct HardyCheck {
  double lhs = 0.0;       // ∫ |∇u|² − H u²
  double rhs = 0.0;       // (1/4 − κ) ∫ u² / |x|²
  double gradient = 0.0;  // ∫ |∇u|²
  bool pass = false;
};

/// Discrete check of ∫|∇u|² − ∫Hu² >= (1/4 − κ)∫u²/|x|² with slack
/// rel_slack ∫|∇u|². The gradient energy is the five-point cell-centred
/// form with zero data outside the grid.
HardyCheck hardy_positivity_check(const CylField& u, const PenalizationParams& par,
                                  double rel_slack = 1e-6);

/// Threshold ε²H + μV of the penalized branch.
double penalty_threshold(const PotentialSpec& spec, const PenalizationParams& par, double s,
                         double r);

/// g_ε(x, t): K t₊^p inside the region, min{(ε²H + μV) t₊, K t₊^p} outside.
double penalized_g(const PotentialSpec& spec, const RegionLambda& region,
                   const PenalizationParams& par, double p, double s, double r, double t);

/// G_ε(x, t) = ∫₀ᵗ g_ε(x, τ) dτ in closed form.
double penalized_G(const PotentialSpec& spec, const RegionLambda& region,
                   const PenalizationParams& par, double p, double s, double r, double t);

/// Closed-form branches with the threshold L = ε²H + μV already evaluated;
/// the solver uses these on cached coefficients.
double g_branch(bool inside, double K, double L, double p, double t);
double G_branch(bool inside, double K, double L, double p, double t);

/// V + ρ / (1 + |x|).
double effective_W(const PotentialSpec& spec, double s, double r);

/// (1 − μ) V + C ρ / (C' + |x|), with C, C' from a lower bound on φ.
double effective_W_eps(const PotentialSpec& spec, const PenalizationParams& par, double C,
                       double C_prime, double s, double r);

enum class EnvelopeCase { Base, InfinityQuadratic, InfinitySubquadratic, OriginQuadratic,
                          OriginSuperquadratic };

/// Accepts base, inf-quadratic, inf-subquadratic, zero-quadratic,
/// zero-superquadratic. Throws DomainError otherwise.
EnvelopeCase parse_envelope_case(const std::string& tag);

struct EnvelopeConstants {
  double C = 1.0;
  double lambda = 1.0;
  double nu = 1.0;
  double exponent = 3.0;  // α at infinity, γ at the origin
};

/// Upper-bound envelope for a solution concentrating on the circle through
/// `circle`, at point x.
double decay_envelope(EnvelopeCase c, const EnvelopeConstants& k, double eps, CylPoint x,
                      CylPoint circle);

/// cosh(λ (R − d(x, x̄)) / ε).
double cosh_barrier(double lambda, double R, double eps, CylPoint x, CylPoint center);

} // namespace cylsp
