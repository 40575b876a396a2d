#pragma once

// Ground states of the planar limit equation  -Δu + a u = b u^p  and the
// ground-energy function E(a, b).

#include <span>
#include <string>
#include <vector>

namespace cylsp {

/// Radial profile w(ρ) of a ground state sampled at ρ_i = rho0 + i h.
struct GroundState2D {
  double a = 1.0, b = 1.0, p = 4.0;
  double rho0 = 0.0;
  double h = 0.0;
  double R_max = 0.0;
  std::vector<double> w;
  std::vector<double> dw;  // w'(ρ_i)

  double energy = 0.0;             // I_{a,b}(w)
  double nehari_residual = 0.0;    // |<I'(w), w>| / ∫(|∇w|² + a w²)
  double equation_residual = 0.0; // max |−w'' − w'/ρ + a w − b w^p| / max(a w)
  std::string method;

  double rho(std::size_t i) const { return rho0 + static_cast<double>(i) * h; }

  /// Interpolated profile; beyond R_max the linear decay a K0(√a ρ) tail is
  /// continued from the last sample.
  double value(double rho) const;

  /// I_{a,b} recomputed by quadrature of the stored samples.
  double energy_from_profile() const;

  /// Positive, strictly decreasing, Nehari residual <= tol. Throws
  /// InvariantViolation otherwise.
  void validate(double tol) const;
};

struct ShootingOptions {
  double radius_factor = 12.0;   // R_max = radius_factor / √a
  double sample_factor = 1e-3;   // sample step = sample_factor / √a
  double ode_tol = 1e-13;
};

/// Bisection on w(0) for the decaying separatrix of the radial ODE.
/// Requires a > 0, b > 0, p > 1.
GroundState2D shoot_radial_ground_state(double a, double b, double p, double tol = 1e-6,
                                        const ShootingOptions& opts = {});

/// Cell-centred field on the quadrant [0, n h]^2, extended evenly to the
/// plane and by zero outside the box.
struct QuadrantField {
  double h = 0.05;
  int n = 0;
  std::vector<double> values;  // row-major, index = j * n + i for (x_i, y_j)

  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
  double x(int i) const { return (i + 0.5) * h; }
};

/// ½∫(|∇u|² + a u²) − b/(p+1) ∫ u₊^{p+1} over the plane, midpoint rule.
double limit_functional(const QuadrantField& u, double a, double b, double p);

struct GradientFlowOptions {
  double h = 0.025;             // cell size in decay lengths 1/√a
  double radius_factor = 12.0;  // box half-width in decay lengths 1/√a
  int max_iterations = 400;
};

struct GradientFlowResult {
  GroundState2D state;
  QuadrantField field;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Sobolev-preconditioned descent of I_{a,b} with Nehari rescaling
/// t* = (∫|∇u|²+au² / b∫u₊^{p+1})^{1/(p−1)} after every step.
/// Throws SolverError when the box is shorter than 3 decay lengths or the
/// descent stagnates above tol.
GradientFlowResult gradient_flow_ground_state(double a, double b, double p, double tol = 1e-9,
                                              const GradientFlowOptions& opts = {},
                                              const QuadrantField* initial = nullptr);

// ---------------------------------------------------------------------------

struct GroundEnergyCache {
  double p = 4.0;
  double E11 = 0.0;
  std::string provenance;
  double tol = 0.0;

  void validate() const;
  std::string to_text() const;
  static GroundEnergyCache from_text(const std::string& text);
};

/// E(1,1) by shooting.
GroundEnergyCache make_ground_energy_cache(double p, double tol = 1e-8);

/// E(1,1) a^{(p+1)/(p−1)−1} b^{−2/(p−1)}.
double ground_energy(double a, double b, const GroundEnergyCache& cache);

struct LemmaCheck {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  /// log(E(λa,λb)/E(a,b)) / log λ measured on shot ground states.
  double observed_scaling_degree = 0.0;
  bool all_pass() const;
  const LemmaCheck& check(const std::string& name) const;
};

/// Checks continuity, monotonicity in a and b, the λ-scaling identity
/// E(λa,λb) = λ^{−1/2} E(a,b) as stated, and the closed form against
/// independently shot ground states. Violations are reported, not thrown.
LemmaReport verify_lemma_properties(const GroundEnergyCache& cache,
                                    std::span<const double> a_values,
                                    std::span<const double> b_values,
                                    std::span<const double> lambdas, double tol = 1e-3);

void write_profile(const std::string& path, const GroundState2D& g);

} // namespace cylsp
