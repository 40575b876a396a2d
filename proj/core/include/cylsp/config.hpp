#pragma once

// JSON problem files. Top-level sections:
//   V, K, rho      number, term record, or list of term records
//   Lambda         {r0, a_s, a_r}
//   p              exponent
//   exponents      optional {sigma, tau, alpha, gamma}
//   penalization   {eps, kappa, beta, mu}
//   grid           {cells_per_eps, fine_halfwidth, stretch, coarse_h, pad, excluded_radius}
//   solver         {tol, max_iterations, refresh_every, conjugate, negative_tol}
//   sweep          {eps: [...], out, envelope, profile_window, tail_radius, tail_delta}
// Term records carry "kind": constant | axis_power | ring_poly | gaussian | bump,
// plus the parameters of that term.

#include "cylsp/solver.hpp"

#include <string>
#include <vector>

namespace cylsp {

struct SweepSection {
  std::vector<double> eps;
  std::string out = "out";
  std::string envelope = "base";
  double profile_window = 3.0;  // window |y| <= R of the rescaled profile check
  double tail_radius = 6.0;     // tail check: u <= tail_delta outside the ball
  double tail_delta = 1e-2;     // of radius tail_radius * ε around x̄
};

struct ProblemConfig {
  PenalizedProblem problem;
  SweepSection sweep;
};

/// Throws ConfigError on malformed input or unknown keys.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

} // namespace cylsp
