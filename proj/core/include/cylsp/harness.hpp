#pragma once

// ε-sweeps of the penalized problem with concentration diagnostics.

#include "cylsp/config.hpp"
#include "cylsp/solver.hpp"

#include <string>
#include <vector>

namespace cylsp {

struct SweepConfig {
  PenalizedProblem problem;
  std::vector<double> eps;  // strictly decreasing
  std::string out_dir;      // empty: nothing written
  EnvelopeCase envelope = EnvelopeCase::Base;
  double profile_window = 3.0;
  double tail_radius = 6.0;
  double tail_delta = 1e-2;
  int threads = 1;  // rows solved concurrently

  static SweepConfig from(const ProblemConfig& cfg);
  /// Throws ConfigError.
  void validate() const;
};

struct DecayFit {
  double C = 0.0;
  double lambda_hat = 0.0;  // slope in z = d/(1+d); ~ λ/ε
  double lambda = 0.0;      // lambda_hat · ε
  double nu = 0.0;          // quadratic cases only
  double rms = 0.0;         // weighted rms residual of log u
  std::size_t samples = 0;
};

struct SweepRow {
  double eps = 0.0;
  bool ok = false;
  std::string error;

  double h = 0.0;  // fine cell size
  double J_over_eps2 = 0.0;
  double c_eps_over_eps2 = 0.0;
  double s_star = 0.0, r_star = 0.0, u_max = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool positive = false;
  bool penal_active = false;
  bool original = false;
  double original_margin = 0.0;
  double lambda_hat = 0.0;
  DecayFit fit;
  double profile_deviation = 0.0;
  double tail_max = 0.0;
  double distance_to_boundary = 0.0;
  double energy_norm_over_eps2 = 0.0;
  double interaction_over_eps2 = 0.0;
  double M_at_max = 0.0;  // M(x̄_ε)
  double seconds = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double E11 = 0.0;
  double r_target = 0.0;     // minimizer of M on the slice
  double inf_M = 0.0;
  double target_pi_infM = 0.0;
  bool interior = false;

  /// eps, c_eps_over_eps2, J_over_eps2, r_star, s_star, u_max, lambda_hat,
  /// penal_active, target_pi_infM, target_r_star
  std::string to_csv() const;
  /// The fixed columns followed by the remaining diagnostics.
  std::string diagnostics_csv() const;
};

/// One row per ε, in the given order. A failed solve marks its row and the
/// sweep continues.
SweepReport run_sweep(const SweepConfig& cfg);

/// Solve at a single ε: ansatz at center, descent, diagnostics.
SweepRow solve_row(const SweepConfig& cfg, double eps, double E11, CylPoint center,
                   SolveReport* out = nullptr);

/// sup over |y| <= R of |u(x̄ + εy) − w(|y|)|, sampled at the cell centres
/// inside the window and at x̄ itself. Throws DomainError when the window
/// leaves the grid.
double rescaled_profile_check(const CylField& u, CylPoint center, double eps,
                              const GroundState2D& ground, double R);

/// Weighted least squares of log u against the log of the envelope for
/// `c`, over cells inside `region` with u > 1e-12 and d(x, circle) >= 2ε.
/// For the power cases `exponent` is α (resp. γ). Throws
/// SolverError with fewer than 10 samples.
DecayFit fit_decay(const CylField& u, CylPoint circle, double eps, const RegionLambda& region,
                   EnvelopeCase c = EnvelopeCase::Base, double exponent = 0.0);

/// max u over cells farther than R ε from the circle.
double tail_max(const CylField& u, CylPoint circle, double eps, double R);

void write_text_atomic(const std::string& path, const std::string& text);

} // namespace cylsp
