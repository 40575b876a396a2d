#pragma once

// Cell-centred fields on a tensor grid of the (s, r) half-plane. Cells may
// be nonuniform; r faces start at or above the axis so centres have r > 0.
// With even_in_s the grid covers s >= 0 only and stands for the even
// extension of the field across s = 0.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace cylsp {

struct CylGrid {
  std::vector<double> s_faces;
  std::vector<double> r_faces;
  bool even_in_s = false;

  static CylGrid uniform(double s_min, double h_s, std::size_t ns, double h_r, std::size_t nr,
                         bool even_in_s = false);

  std::size_t ns() const { return s_faces.size() - 1; }
  std::size_t nr() const { return r_faces.size() - 1; }
  std::size_t size() const { return ns() * nr(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nr() + j; }

  double s(std::size_t i) const { return 0.5 * (s_faces[i] + s_faces[i + 1]); }
  double r(std::size_t j) const { return 0.5 * (r_faces[j] + r_faces[j + 1]); }
  double ds(std::size_t i) const { return s_faces[i + 1] - s_faces[i]; }
  double dr(std::size_t j) const { return r_faces[j + 1] - r_faces[j]; }

  /// 3D volume 2π r ds dr of the ring swept by cell (i, j); on an even grid
  /// this is the volume of the s > 0 half only.
  double volume(std::size_t i, std::size_t j) const;
  /// 1 or 2: how many copies of a cell the even extension carries.
  double mirror_factor() const { return even_in_s ? 2.0 : 1.0; }

  /// Throws InvariantViolation on unsorted faces, negative r, or an even
  /// grid not starting at s = 0.
  void validate() const;
};

class CylField {
public:
  CylField() = default;
  explicit CylField(std::shared_ptr<const CylGrid> grid, double fill = 0.0);

  const CylGrid& grid() const { return *grid_; }
  std::shared_ptr<const CylGrid> grid_ptr() const { return grid_; }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  double& operator()(std::size_t i, std::size_t j) { return v_[grid_->index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[grid_->index(i, j)]; }

  /// Bilinear interpolation between cell centres; constant extrapolation
  /// inside the outer half cells, mirror in s for even grids.
  double sample(double s, double r) const;

  /// ∫ f over all of R^3 (both halves on an even grid).
  double integral() const;

  /// Throws InvariantViolation on non-finite values.
  void validate() const;

private:
  std::shared_ptr<const CylGrid> grid_;
  std::vector<double> v_;
};

/// Text export: a header with the face coordinates and the even flag, then
/// one line of values per s row.
void write_field(const std::string& path, const CylField& f);
CylField read_field(const std::string& path);

} // namespace cylsp
