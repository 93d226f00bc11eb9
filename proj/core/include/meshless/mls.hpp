#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "meshless/pointcloud.hpp"

namespace meshless {

/// Gaussian weight w_ij = exp(-alpha |x_j - x_i|^2).
struct WeightConfig {
  double alpha = 1.0;

  /// alpha = dx^-2 in 1D and 6 / h_max^2 in 2D.
  static WeightConfig defaults(int dim, double dx, double h_max);
};

inline double weight(double dist2, const WeightConfig& cfg) { return std::exp(-cfg.alpha * dist2); }
double weight(const PointCloud& cloud, std::size_t i, std::size_t j, const WeightConfig& cfg);

/// Derivative multi-index (number of x and y derivatives).
struct MultiIndex {
  int x = 0;
  int y = 0;
  int order() const { return x + y; }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices with 1 <= |d| <= degree in graded lexicographic order:
/// by total order, then by descending x power. 1D: (1), (2), ...;
/// 2D degree 2: (1,0), (0,1), (2,0), (1,1), (0,2).
std::vector<MultiIndex> taylor_monomials(int dim, int degree);

struct FitOptions {
  int degree = 2;
  WeightConfig weight;
  /// Gram matrices whose reciprocal condition estimate falls below this are
  /// rejected as singular.
  double min_rcond = 1e-12;
  /// Drop to lower degrees at points where the requested fit is singular
  /// instead of throwing; missing derivative rows are left at zero. Above
  /// degree 1 a reduced fit also needs more points than unknowns.
  bool reduce_degree = false;
  /// Leave points whose fit fails unfitted (point_degree 0, zero rows)
  /// instead of throwing.
  bool allow_unfitted = false;
  /// Points marked here are not fitted (all rows zero).
  std::vector<bool> skip;
};

/// Per-point MLS coefficient rows: for every fitted derivative d and point i,
/// d^d u(x_i) ~= sum_{j in S_i} c^d_ij (u_j - u_i). Rows depend only on the
/// geometry and the weights. In 1D degree 2 the rows are the first/second
/// derivative coefficients (kappa, lambda); in 2D they are ordered as
/// u_x, u_y, u_xx, u_xy, u_yy, ...
class DerivativeOperator {
 public:
  DerivativeOperator() = default;
  DerivativeOperator(int dim, int degree, StencilSet stencils, std::vector<double> coeffs,
                     std::vector<int> point_degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return stencils_.size(); }
  std::span<const MultiIndex> derivatives() const { return derivs_; }
  std::size_t derivative_count() const { return derivs_.size(); }
  /// Position of `d` in derivatives(); throws InvalidArgument if not fitted.
  std::size_t index_of(MultiIndex d) const;
  bool has(MultiIndex d) const;

  const StencilSet& stencils() const { return stencils_; }
  std::span<const std::size_t> stencil(std::size_t i) const { return stencils_[i]; }
  /// Degree actually fitted at point i (lower than degree() after reduction,
  /// 0 for skipped points).
  int point_degree(std::size_t i) const { return point_degree_[i]; }

  std::span<const double> row(std::size_t d, std::size_t i) const {
    const std::size_t ns = stencils_[i].size();
    return {coeffs_.data() + stencils_.offset(i) * derivs_.size() + d * ns, ns};
  }

  double apply(std::size_t d, std::size_t i, std::span<const double> u) const;
  double apply(MultiIndex d, std::size_t i, std::span<const double> u) const {
    return apply(index_of(d), i, u);
  }
  /// All derivatives at point i, in derivatives() order.
  void apply_all(std::size_t i, std::span<const double> u, std::span<double> out) const;
  /// Derivative d at every point.
  void apply_field(std::size_t d, std::span<const double> u, std::span<double> out) const;

 private:
  int dim_ = 1;
  int degree_ = 0;
  std::vector<MultiIndex> derivs_;
  StencilSet stencils_;
  std::vector<double> coeffs_;
  std::vector<int> point_degree_;
};

/// Solves the weighted normal equations at every point for a degree-`degree`
/// Taylor polynomial. The monomial basis is centred at x_i and scaled by
/// h_max before factorisation (pivoted LU of the Gram matrix).
/// Throws SingularStencil when a stencil has fewer points than monomials or
/// the Gram matrix is too ill-conditioned, unless reduce_degree is set.
DerivativeOperator fit(const PointCloud& cloud, const StencilSet& stencils,
                       const FitOptions& opts);

/// Debug dump: `point,dx,dy,neighbor,coefficient`.
void write_operator_csv(std::ostream& os, const DerivativeOperator& op);

}  // namespace meshless

