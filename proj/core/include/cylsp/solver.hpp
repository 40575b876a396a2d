#pragma once

// Penalized functional J_ε on the reduced half-plane, its gradient, and a
// Nehari-projected preconditioned descent to a positive critical point.

#include "cylsp/cyl_field.hpp"
#include "cylsp/limit2d.hpp"
#include "cylsp/model.hpp"
#include "cylsp/penalty.hpp"
#include "cylsp/poisson.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cylsp {

/// Two-zone tensor grid: uniform cells of size ε / cells_per_eps within
/// fine_halfwidth·ε of the centre, geometric growth by `stretch` up to
/// coarse_h beyond. The grid covers s in [0, a_s + pad·ε] (even in s) and
/// r in [0, r0 + a_r + pad·ε].
struct GridPolicy {
  double cells_per_eps = 8.0;
  double fine_halfwidth = 5.0;
  double stretch = 1.1;
  double coarse_h = 0.1;
  double pad = 10.0;
  double excluded_radius = 0.0;  // cells closer to the origin use μV as threshold

  void validate() const;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iterations = 3000;
  double armijo = 1e-4;
  int refresh_every = 25;  // full Poisson recomputation period
  bool conjugate = true;   // Polak-Ribière directions, else steepest descent
  double negative_tol = 1e-10;
};

struct PenalizedProblem {
  PotentialSpec spec;
  RegionLambda region;
  PenalizationParams par;
  double p = 4.0;
  GridPolicy grid;
  SolverOptions opts;

  /// Growth classification admissible, region away from the axis, p > 3.
  void validate() const;
};

/// Grid for the problem, refined around `center`.
std::shared_ptr<const CylGrid> make_grid(const PenalizedProblem& prob, CylPoint center);

/// Cached per-cell coefficients, stiffness and (optionally) the dense
/// kernel matrix. Functions of the field are plain vectors in grid order.
class Discretization {
public:
  Discretization(const PenalizedProblem& prob, std::shared_ptr<const CylGrid> grid,
                 bool cache_kernel = true);
  ~Discretization();
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const CylGrid& grid() const { return *grid_; }
  std::shared_ptr<const CylGrid> grid_ptr() const { return grid_; }
  std::size_t size() const { return grid_->size(); }
  const PenalizedProblem& problem() const { return prob_; }

  /// Full-space quadrature weight of each cell.
  const std::vector<double>& weight() const { return w_; }

  /// φ of ρ a b (bilinear in a, b).
  std::vector<double> potential(const std::vector<double>& a, const std::vector<double>& b) const;

  /// uᵀ(ε²S + diag(wV))u, i.e. ∫ ε²|∇u|² + V u².
  double quadratic(const std::vector<double>& u) const;
  double gradient_energy(const std::vector<double>& u) const;  // ∫|∇u|²
  /// Σ w ρ φ u².
  double quartic(const std::vector<double>& u, const std::vector<double>& phi) const;
  double primitive(const std::vector<double>& u) const;  // Σ w G_ε(x, u)

  double energy(const std::vector<double>& u) const;
  double energy(const std::vector<double>& u, const std::vector<double>& phi) const;

  /// Euclidean gradient of the discrete J with respect to the cell values.
  std::vector<double> gradient(const std::vector<double>& u, const std::vector<double>& phi) const;

  /// z = P^{-1} r with P = ε²S + diag(w V), by sparse Cholesky.
  std::vector<double> precondition(const std::vector<double>& r) const;
  double P_norm2(const std::vector<double>& u) const;

  /// t > 0 with d/dt J(t u) = 0, given A = quadratic(u), B = quartic(u).
  /// Throws SolverError when no sign change is found.
  double fiber_maximizer(const std::vector<double>& u, double A, double B) const;

  bool inside(std::size_t k) const { return inside_[k] != 0; }
  double V(std::size_t k) const { return V_[k]; }
  double K(std::size_t k) const { return K_[k]; }
  double rho(std::size_t k) const { return rho_[k]; }
  double threshold(std::size_t k) const { return L_[k]; }

private:
  struct Impl;
  PenalizedProblem prob_;
  std::shared_ptr<const CylGrid> grid_;
  std::vector<double> w_, ws_, V_, K_, rho_, L_;
  std::vector<char> inside_;
  std::unique_ptr<KernelMatrix> kernel_;
  std::unique_ptr<Impl> impl_;
};

/// ½∫(ε²|∇u|² + V u²) + ¼∫φ_u u² ρ − ∫G_ε(x, u).
double energy_J(const PenalizedProblem& prob, const CylField& u);

/// L² gradient −ε²Δu + V u + ρ φ_u u − g_ε(x, u): ⟨grad_J, v⟩ = dJ(u)[v].
CylField grad_J(const PenalizedProblem& prob, const CylField& u);

/// ∫ f g over R^3.
double l2_inner(const CylField& f, const CylField& g);

/// η(x) w(d(x, center)/ε) with a smooth cut-off η equal to 1 on the inner
/// half of the region, rescaled to the maximum of t ↦ J(t u0).
CylField build_ansatz(const PenalizedProblem& prob, const GroundState2D& ground,
                      CylPoint center, std::shared_ptr<const CylGrid> grid,
                      bool cutoff = true);
CylField build_ansatz(const Discretization& disc, const GroundState2D& ground,
                      CylPoint center, bool cutoff = true);

/// Cut-off used by the ansatz: 1 on the inner half of the region, 0 outside.
double region_cutoff(const RegionLambda& region, double s, double r);

struct SolveReport {
  double eps = 0.0;
  CylField u;
  CylField phi;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
  double s_star = 0.0, r_star = 0.0;
  double u_max = 0.0;
  double c_eps = 0.0;  // path maximum, filled by mountain_pass_level
  bool positive = false;
  double negative_part = 0.0;  // ‖u₋‖ / ‖u‖
  bool penalization_active = false;
  double energy_norm = 0.0;   // ∫ ε²|∇u|² + V u²
  double interaction = 0.0;   // D(ρu², ρu²)
  double seconds = 0.0;

  std::string to_json() const;
  /// report.json, u.grid, phi.grid into dir
  void write(const std::string& dir) const;
};

/// Runs the descent from `initial`; throws DomainError when J(initial) is
/// not positive and finite, SolverError on stagnation or the iteration cap.
SolveReport descent_solve(const Discretization& disc, const CylField& initial);
SolveReport descent_solve(const PenalizedProblem& prob, const CylField& initial);

/// Recompute the scalar fields of a report from its u.
void fill_report(const Discretization& disc, SolveReport& rep);

/// max_t J(t u*) on a sampled grid of (0, T], T with J(T u*) < 0.
double mountain_pass_level(const Discretization& disc, const CylField& u_star,
                           int samples = 400);

struct OriginalCheck {
  bool flag = false;
  double min_margin = 0.0;
  CylField margin;  // (ε²H + μV) − K u^{p−1} outside the region, 0 inside
};

OriginalCheck verify_original(const Discretization& disc, const SolveReport& rep);
OriginalCheck verify_original(const PenalizedProblem& prob, const SolveReport& rep);

} // namespace cylsp
