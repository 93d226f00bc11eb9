#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace meshless {

using Vec2 = std::array<double, 2>;

/// Axis-aligned box in one or two dimensions; every axis is either periodic
/// or bounded. In 1D only component 0 of each array is meaningful.
struct Domain {
  int dim = 1;
  Vec2 lo{-5.0, -5.0};
  Vec2 hi{5.0, 5.0};
  std::array<bool, 2> periodic{true, true};

  double length(int axis) const { return hi[axis] - lo[axis]; }
  void validate() const;

  static Domain periodic_box(int dim, double lo, double hi);
  static Domain bounded_interval(double lo, double hi);
};

/// Perturbed-lattice generator settings. `randomness` is a length and must
/// not exceed half the lattice spacing.
struct GridGenConfig {
  std::size_t n_per_axis = 100;
  double randomness = 0.0;
  std::uint64_t seed = 0;
};

/// Lattice spacing for `n` nodes per axis: L/n on a periodic axis, L/(n-1)
/// on a bounded one (both end nodes sit on the boundary).
double lattice_spacing(const Domain& domain, std::size_t n_per_axis, int axis = 0);

/// Default neighbour radius: 3.5 dx in 1D, sqrt(34) dx in 2D.
double default_neighbor_radius(int dim, double dx);

/// Minimal-image displacement x_j - x_i. Periodic components satisfy
/// |d| <= L/2; bounded components are plain differences.
Vec2 periodic_delta(const Vec2& xi, const Vec2& xj, const Domain& domain);

inline double norm2(const Vec2& d) { return d[0] * d[0] + d[1] * d[1]; }

/// Compressed per-point index lists.
class StencilSet {
 public:
  StencilSet() = default;
  explicit StencilSet(const std::vector<std::vector<std::size_t>>& lists);

  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t total() const { return indices_.size(); }
  std::span<const std::size_t> operator[](std::size_t i) const {
    return {indices_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t min_count() const;
  std::size_t max_count() const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> indices_;
};

/// Fixed-radius neighbour sets C_i = { j != i : |x_j - x_i| <= h_max }, with
/// neighbour indices sorted ascending. Uses a bucket grid when the domain is
/// wide enough, otherwise a brute-force scan; both give identical output.
/// Throws InvalidArgument on coincident points.
StencilSet build_neighborhoods(const Domain& domain, std::span<const Vec2> positions,
                               double h_max);

/// Immutable point cloud with neighbourhoods, cached pair displacements and
/// per-point cell sizes.
class PointCloud {
 public:
  PointCloud(Domain domain, std::vector<Vec2> positions, double base_spacing, double h_max);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  std::size_t size() const { return positions_.size(); }
  const Vec2& position(std::size_t i) const { return positions_[i]; }
  std::span<const Vec2> positions() const { return positions_; }
  double base_spacing() const { return base_spacing_; }
  double h_max() const { return h_max_; }

  const StencilSet& neighbors() const { return neighbors_; }
  std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors_[i]; }
  /// Displacements x_j - x_i aligned with neighbors(i).
  std::span<const Vec2> neighbor_deltas(std::size_t i) const {
    return {deltas_.data() + neighbors_.offset(i), neighbors_[i].size()};
  }
  Vec2 delta(std::size_t i, std::size_t j) const {
    return periodic_delta(positions_[i], positions_[j], domain_);
  }

  /// Local length scale delta_i used by the MOOD relaxation.
  std::span<const double> cell_sizes() const { return cell_sizes_; }
  /// First-order quadrature weights (sum of weights approximates |domain|).
  std::span<const double> quadrature_weights() const { return quadrature_; }

  PointCloud with_radius(double h_max) const;

 private:
  Domain domain_;
  std::vector<Vec2> positions_;
  double base_spacing_;
  double h_max_;
  StencilSet neighbors_;
  std::vector<Vec2> deltas_;
  std::vector<double> cell_sizes_;
  std::vector<double> quadrature_;
};

/// Perturbed uniform lattice: x = lo + dx*k + r*(2p - 1), p ~ U(0,1) drawn
/// from std::mt19937_64(seed) using 53 random bits mapped to the open
/// interval (0,1). x varies fastest in 2D (index = iy*n + ix). Periodic
/// coordinates are wrapped into [lo, hi); on bounded axes the two end nodes
/// are not perturbed.
PointCloud generate_grid(const Domain& domain, const GridGenConfig& cfg);
PointCloud generate_grid(const Domain& domain, const GridGenConfig& cfg, double h_max);

/// U_i = { j in C_i : a * dx_ij < 0 }. An empty result flags a degenerate
/// stencil; the caller decides whether that is an error.
std::vector<std::size_t> upwind_stencil_1d(const PointCloud& cloud, std::size_t i, double a);
StencilSet upwind_stencils_1d(const PointCloud& cloud, double a);

/// Half-plane partitions of C_i. Zero displacement components are assigned
/// to the positive side (right / top).
struct DirectionalStencils {
  std::vector<std::size_t> left, right, bottom, top;
};
DirectionalStencils directional_stencils(const PointCloud& cloud, std::size_t i);

enum class Side { left, right, bottom, top };
StencilSet directional_stencil_set(const PointCloud& cloud, Side side);

struct CellSizes {
  std::vector<double> delta;
  std::vector<double> quadrature;
};
/// 1D: delta_i = (x_{i+1} - x_{i-1}) / 2 over coordinate-sorted neighbours
/// (one-sided at bounded ends); 2D: delta_i = base spacing. Quadrature weight
/// is delta_i in 1D and dx^2 in 2D.
CellSizes cell_sizes(const Domain& domain, std::span<const Vec2> positions, double base_spacing);

/// Grid CSV: metadata header `dim,N,hmax,dx` and its value row, then
/// `index,x[,y]` rows with 17 significant digits.
void write_grid_csv(std::ostream& os, const PointCloud& cloud);
PointCloud read_grid_csv(std::istream& is, const Domain& domain);

}  // namespace meshless
