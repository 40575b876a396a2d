#pragma once

// Newtonian potential φ = (4π|x|)^{-1} ⋆ f of cylindrically symmetric
// densities, reduced to the (s, r) half-plane with the ring kernel.

#include "cylsp/cyl_field.hpp"

#include <vector>

namespace cylsp {

/// Complete elliptic integral of the first kind K(m), parameter m = k^2,
/// from the complementary parameter m1 = 1 - m by the AGM.
double elliptic_K_complement(double m1);
inline double elliptic_K(double m) { return elliptic_K_complement(1.0 - m); }

/// Average of 1/(4π|x−y|) over the ring of radius r' at axial offset Δs,
/// seen from a point at distance r from the axis:
///   (1/4π) (2/π) K(m) / √((r+r')² + Δs²),   m = 4rr' / ((r+r')² + Δs²).
/// Throws DomainError for negative radii and at the coincident point m = 1.
double ring_kernel(double r, double rp, double ds);

/// Kernel between cell centres t and c of a grid, including the mirror
/// image on even grids; the diagonal is the 2x2 Gauss average of the
/// kernel over the cell.
double cell_kernel(const CylGrid& g, std::size_t t, std::size_t c);

/// φ at cell centres; source must be nonnegative.
CylField newtonian_potential(const CylField& source);

/// φ at an arbitrary point, by direct summation over the source cells.
double potential_at(const CylField& source, double s, double r);

/// D(f, g) = ∫∫ f(x) g(y) / |x − y|, for nonnegative f, g.
double interaction_energy(const CylField& f, const CylField& g);

/// ‖−Δφ − f‖ / ‖f‖ over interior cells, cylindrical five-point Laplacian,
/// volume-weighted L2. With f = 0 the norm of φ is used instead.
double poisson_residual(const CylField& phi, const CylField& source);

/// Dense symmetric kernel matrix of a grid, built once and applied many
/// times: φ = G (vol ⊙ f).
class KernelMatrix {
public:
  KernelMatrix() = default;
  explicit KernelMatrix(std::shared_ptr<const CylGrid> grid);

  std::size_t size() const { return n_; }
  const CylGrid& grid() const { return *grid_; }
  double operator()(std::size_t t, std::size_t c) const { return G_[t * n_ + c]; }

  /// φ = G (vol ⊙ f), no sign check.
  void potential(const double* f, double* phi) const;
  std::vector<double> potential(const std::vector<double>& f) const;

private:
  std::shared_ptr<const CylGrid> grid_;
  std::size_t n_ = 0;
  std::vector<double> G_;
  std::vector<double> vol_;
};

} // namespace cylsp
