#pragma once

// Problem data on the reduced (s, r) half-plane: s is the coordinate along
// the symmetry axis d, r >= 0 the distance to it. Every potential is a sum
// of closed-form terms, so cylindrical symmetry holds by construction and
// the growth conditions can be decided from the term asymptotics.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cylsp {

struct CylPoint {
  double s = 0.0;
  double r = 0.0;
};

/// Euclidean norm |x| of any 3D point on the circle represented by (s, r).
inline double norm3(CylPoint x) { return std::hypot(x.s, x.r); }

/// Distance between the circles represented by x and y.
double cyl_distance(CylPoint x, CylPoint y);

// ---------------------------------------------------------------------------
// Term algebra

struct ConstantTerm {
  double c = 0.0;
};

/// c |x|^q with |x| the 3D norm.
struct AxisPowerTerm {
  double c = 0.0;
  double q = 0.0;
};

/// Evaluation window of a ring polynomial; points outside are clamped onto
/// the window before evaluation, so the term is bounded.
struct Window {
  double s_min = 0.0, s_max = 0.0;
  double r_min = 0.0, r_max = 0.0;
};

/// c * sum_ij coeffs[i][j] s^i (r - r0)^j.
struct RingPolyTerm {
  double c = 1.0;
  double r0 = 0.0;
  std::vector<std::vector<double>> coeffs;
  std::optional<Window> window;
};

/// c exp(-((s - s0)^2 + (r - r0)^2) / w^2).
struct GaussianTerm {
  double c = 0.0;
  double s0 = 0.0;
  double r0 = 0.0;
  double width = 1.0;
};

/// Smooth bump in |x|, supported in the shell inner < |x| < outer, peak c.
struct CompactBumpTerm {
  double c = 0.0;
  double inner = 0.0;
  double outer = 1.0;
};

/// Arbitrary user function of (s, r). Evaluable, never classifiable.
struct CallableTerm {
  std::function<double(double, double)> fn;
};

using Term = std::variant<ConstantTerm, AxisPowerTerm, RingPolyTerm,
                          GaussianTerm, CompactBumpTerm, CallableTerm>;

/// Power-law bracket of a nonnegative function near 0 or near infinity:
///   f <= C |x|^upper   and, when `lower` is set,   f >= c |x|^lower.
/// `upper` is -inf at infinity (resp. +inf at the origin) for functions that
/// vanish there faster than any power.
struct Asymptotics {
  double upper = 0.0;
  std::optional<double> lower;
};

struct TermAsymptotics {
  bool classifiable = true;
  std::string reason;
  Asymptotics at_infinity;
  Asymptotics at_origin;
};

/// One of V, K, rho: the sum of its terms.
class PotentialField {
public:
  PotentialField() = default;
  explicit PotentialField(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static PotentialField constant(double c) { return PotentialField({ConstantTerm{c}}); }

  /// Throws DomainError at a declared singularity (axis power with q < 0 at
  /// the origin).
  double operator()(double s, double r) const;
  double operator()(CylPoint x) const { return (*this)(x.s, x.r); }

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool identically_zero() const;
  bool singular_at_origin() const;
  TermAsymptotics asymptotics() const;

private:
  std::vector<Term> terms_;
};

struct PotentialSpec {
  PotentialField V;
  PotentialField K;
  PotentialField rho;
  // Declared exponent metadata, echoed in reports.
  std::optional<double> sigma, tau, alpha, gamma;

  /// Throws InvariantViolation when K is identically zero.
  void validate() const;
};

struct PotentialValues {
  double V = 0.0;
  double K = 0.0;
  double rho = 0.0;
};

/// Throws DomainError for r < 0 or at a singular point, InvariantViolation
/// for a negative value.
PotentialValues eval_potentials(const PotentialSpec& spec, double s, double r);

// ---------------------------------------------------------------------------
// Region

/// Ellipse-of-revolution region {(s/a_s)^2 + ((r - r0)/a_r)^2 < 1}.
struct RegionLambda {
  double r0 = 2.0;
  double a_s = 1.0;
  double a_r = 1.0;

  /// Throws InvariantViolation if the closure touches the axis.
  void validate() const;
  bool contains(CylPoint x) const;
  double margin_to_axis() const { return r0 - a_r; }
  /// d_d-distance from x to the boundary of the region.
  double distance_to_boundary(CylPoint x) const;
};

// ---------------------------------------------------------------------------
// Growth conditions

struct GrowthClass {
  bool classifiable = true;
  std::string reason;

  bool G1_inf = false, G2_inf = false, G3_inf = false;
  bool G1_0 = false, G2_0 = false, G3_0 = false;

  double sigma = 0.0;           // K <= C|x|^sigma at infinity
  std::optional<double> alpha;  // W >= c|x|^-alpha at infinity
  double tau = 0.0;             // K <= C|x|^tau near 0
  std::optional<double> gamma;  // V >= c|x|^-gamma near 0

  bool any_infinity() const { return G1_inf || G2_inf || G3_inf; }
  bool any_origin() const { return G1_0 || G2_0 || G3_0; }
  bool admissible() const { return classifiable && any_infinity() && any_origin(); }
};

/// Decides the three growth conditions at infinity and at the origin from
/// the symbolic term asymptotics, with W = V + rho/(1+|x|). A spec holding a
/// callable or an unwindowed nonconstant polynomial is reported unclassifiable.
GrowthClass classify_growth(const PotentialSpec& spec, double p);

// ---------------------------------------------------------------------------
// Concentration functionals

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// E11 r V^{(p+1)/(p-1)-1} K^{-2/(p-1)}, +inf where K vanishes.
double auxiliary_potential_M(const PotentialSpec& spec, double E11, double p,
                             double s, double r);

/// V^{(p+1)/(p-1)-3/2} K^{-2/(p-1)}, +inf where K vanishes.
double concentration_functional_A(const PotentialSpec& spec, double p, double s,
                                  double r);

struct RingMinimum {
  double r_star = 0.0;          // minimizer on the s = 0 slice
  double value = 0.0;           // inf over the open slice
  double boundary_value = 0.0;  // min at the slice endpoints r0 -+ a_r
  double inf_over_region = 0.0; // inf over the whole region
  bool interior = false;        // 0 < value < boundary_value
  bool below_twice_inf = false; // value < 2 inf_over_region
};

/// Dense sampling of M on the s = 0 slice plus Brent refinement around the
/// best sample. Throws NoMinimizerError when M is +inf on the whole slice.
RingMinimum minimize_M_on_ring(const PotentialSpec& spec, double E11, double p,
                               const RegionLambda& region, int samples = 2001);

} // namespace cylsp
