#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshless/mls.hpp"
#include "meshless/pointcloud.hpp"

namespace meshless {

/// Constant advection velocity; defaults a = 1 (1D) and a = (1, 1) (2D).
struct AdvectionConfig {
  Vec2 velocity{1.0, 1.0};
  static AdvectionConfig defaults(int dim);
};

/// WENO regulariser and the reference spacing used in the oscillation
/// indicators (initial average spacing).
struct WenoConfig {
  double epsilon = 1e-6;
  double spacing = 0.1;
  static WenoConfig defaults(int dim, double dx);
};

/// Everything a scheme needs besides the point cloud.
struct SchemeSetup {
  AdvectionConfig advection;
  WeightConfig weight;
  WenoConfig weno;
  /// Fit degree of the naive `central` scheme.
  int central_degree = 2;
  /// Points whose value is prescribed (Dirichlet nodes); their rhs is zero.
  std::vector<bool> inactive;
  /// Lower the MLS degree where a stencil is too lopsided to support it
  /// (bounded domains).
  bool reduce_degree = false;

  static SchemeSetup defaults(const PointCloud& cloud);
  bool is_inactive(std::size_t i) const { return !inactive.empty() && inactive[i]; }
};

/// Optional overrides of the default model parameters. The neighbour radius
/// is given in units of the lattice spacing.
struct ModelParams {
  std::optional<Vec2> velocity;
  std::optional<double> alpha;
  std::optional<double> weno_epsilon;
  std::optional<double> radius_factor;

  double neighbor_radius(int dim, double dx) const;
  SchemeSetup setup(const PointCloud& cloud) const;
};

/// Semi-discretisation du/dt = F(u).
class SpatialScheme {
 public:
  virtual ~SpatialScheme() = default;

  virtual std::string name() const = 0;
  virtual int formal_order() const = 0;
  /// False only for the WENO family.
  virtual bool is_linear() const { return true; }
  virtual bool supports_mood() const { return false; }
  virtual std::size_t size() const = 0;

  virtual void evaluate(std::span<const double> u, std::span<double> dudt) const = 0;
  /// Writes dudt[i] for every i in `points`; other entries are unspecified.
  virtual void evaluate_at(std::span<const double> u, std::span<const std::size_t> points,
                           std::span<double> dudt) const;
};

/// Classical first-order meshless upwind scheme in 1D:
/// du_i/dt = -a sum_k w_ik dx_ik (u_k - u_i) / sum_k w_ik dx_ik^2 over U_i.
class Upwind1Scheme1D final : public SpatialScheme {
 public:
  Upwind1Scheme1D(const PointCloud& cloud, const SchemeSetup& setup);

  std::string name() const override { return "upwind1"; }
  int formal_order() const override { return 1; }
  std::size_t size() const override { return stencils_.size(); }
  void evaluate(std::span<const double> u, std::span<double> dudt) const override;
  void evaluate_at(std::span<const double> u, std::span<const std::size_t> points,
                   std::span<double> dudt) const override;

  const StencilSet& stencils() const { return stencils_; }
  /// Coefficients w dx / sum(w dx^2) aligned with stencils()[i].
  std::span<const double> coefficients(std::size_t i) const {
    return {coeffs_.data() + stencils_.offset(i), stencils_[i].size()};
  }

 private:
  double rhs(std::span<const double> u, std::size_t i) const;

  double a_;
  StencilSet stencils_;
  std::vector<double> coeffs_;
};

/// Largest forward-Euler step keeping the 1D upwind update a convex
/// combination: min_i -(sum w dx^2) / (a sum w dx).
double max_timestep_upwind1(const PointCloud& cloud, const SchemeSetup& setup);

/// Upwind MLS scheme of arbitrary degree. 1D: fit on U_i. 2D: the x
/// derivative is fitted on the upwind half-plane in x, the y derivative on the
/// upwind half-plane in y.
class UpwindScheme final : public SpatialScheme {
 public:
  UpwindScheme(const PointCloud& cloud, const SchemeSetup& setup, int degree);

  std::string name() const override { return "upwind" + std::to_string(degree_); }
  int formal_order() const override { return degree_; }
  std::size_t size() const override { return n_; }
  void evaluate(std::span<const double> u, std::span<double> dudt) const override;
  void evaluate_at(std::span<const double> u, std::span<const std::size_t> points,
                   std::span<double> dudt) const override;

 private:
  double rhs(std::span<const double> u, std::size_t i) const;

  int degree_;
  std::size_t n_;
  Vec2 a_;
  std::vector<bool> inactive_;
  DerivativeOperator x_op_;
  DerivativeOperator y_op_;
};

/// du/dt = -a . grad u with the MLS gradient on the full central stencil.
class CentralScheme final : public SpatialScheme {
 public:
  CentralScheme(const PointCloud& cloud, const SchemeSetup& setup, int degree);

  std::string name() const override { return "central"; }
  int formal_order() const override { return degree_; }
  std::size_t size() const override { return op_.size(); }
  void evaluate(std::span<const double> u, std::span<double> dudt) const override;

 private:
  int degree_;
  Vec2 a_;
  std::vector<bool> inactive_;
  DerivativeOperator op_;
};

/// Rotated frame for the pair (i, j): n along x_j - x_i, s = n rotated by +90
/// degrees, and (alpha_bar, beta_bar) = [n s]^T (alpha, beta).
struct RotatedCoefficients {
  double theta = 0.0;
  Vec2 n{1.0, 0.0};
  Vec2 s{0.0, 1.0};
  double alpha_bar = 0.0;
  double beta_bar = 0.0;
};
RotatedCoefficients rotate_coefficients(const Vec2& delta, double alpha, double beta);

/// First-order positive scheme on the central stencil with an upwind normal
/// flux and a diffusive tangential flux:
/// du_i/dt = sum_j c_ij (u_j - u_i),
/// c_ij = -[abar (a.n - |a.n|) + (bbar a.s - |bbar a.s|)] >= 0.
class Positive2DScheme final : public SpatialScheme {
 public:
  Positive2DScheme(const PointCloud& cloud, const SchemeSetup& setup);

  std::string name() const override { return "positive2d"; }
  int formal_order() const override { return 1; }
  std::size_t size() const override { return stencils_.size(); }
  void evaluate(std::span<const double> u, std::span<double> dudt) const override;
  void evaluate_at(std::span<const double> u, std::span<const std::size_t> points,
                   std::span<double> dudt) const override;

  const StencilSet& stencils() const { return stencils_; }
  std::span<const double> coefficients(std::size_t i) const {
    return {coeffs_.data() + stencils_.offset(i), stencils_[i].size()};
  }
  /// The degree-1 MLS operator providing alpha_ij, beta_ij.
  const DerivativeOperator& gradient_operator() const { return op_; }

 private:
  double rhs(std::span<const double> u, std::size_t i) const;

  DerivativeOperator op_;
  StencilSet stencils_;
  std::vector<double> coeffs_;
};

/// Forward-Euler bound 1 / max_i sum_j c_ij of the positive 2D scheme.
double positive2d_max_timestep(const PointCloud& cloud, const SchemeSetup& setup);
double positive2d_max_timestep(const Positive2DScheme& scheme);

/// Forward-Euler step of the dimension's first-order positive scheme; all
/// CFL numbers are fractions of this.
double euler_timestep(const PointCloud& cloud, const SchemeSetup& setup);

/// MUSCL-type scheme of order m: a degree-m MLS fit on the central stencil is
/// used both to reconstruct midpoint values (donor chosen upwind) and to
/// differentiate them: du_i/dt = -2 sum_j (a . grad-row_ij) (u_ij - u_i).
class MusclScheme final : public SpatialScheme {
 public:
  MusclScheme(const PointCloud& cloud, const SchemeSetup& setup, int order);

  std::string name() const override { return "muscl" + std::to_string(order_); }
  int formal_order() const override { return order_; }
  bool supports_mood() const override { return true; }
  std::size_t size() const override { return op_->size(); }
  void evaluate(std::span<const double> u, std::span<double> dudt) const override;

  /// Reconstructed midpoint value u_ij used for the k-th neighbour of i.
  double midpoint_value(std::span<const double> u, std::size_t i, std::size_t k) const;
  std::shared_ptr<const DerivativeOperator> central_operator() const { return op_; }

 private:
  void derivatives(std::span<const double> u, std::vector<double>& d) const;
  double midpoint(std::span<const double> u, const std::vector<double>& d, std::size_t i,
                  std::size_t k) const;

  int order_;
  std::size_t nd_;
  std::vector<bool> inactive_;
  std::shared_ptr<const DerivativeOperator> op_;
  // Per neighbour pair, aligned with the operator's stencils.
  std::vector<double> grad_weight_;  // 2 (a . (alpha_ij, beta_ij))
  std::vector<signed char> donor_;   // +1: i, -1: j, 0: tie (average)
  std::vector<double> taylor_;       // (d/2)^m / m! per fitted derivative
};

/// Second-order MLS-WENO: per axis, convex combination of the central and
/// upwind half-plane gradients with weights D_k / (indicator_k + eps)^2,
/// D = 0.5 for upwind and central stencils and 0 for the downwind one.
class WenoScheme final : public SpatialScheme {
 public:
  WenoScheme(const PointCloud& cloud, const SchemeSetup& setup);

  std::string name() const override { return "weno2"; }
  int formal_order() const override { return 2; }
  bool is_linear() const override { return false; }
  std::size_t size() const override { return central_.size(); }
  void evaluate(std::span<const double> u, std::span<double> dudt) const override;

  struct AxisWeights {
    double central = 0.0;
    double upwind = 0.0;
    double derivative = 0.0;
  };
  /// Nonlinear weights and resulting derivative along `axis` at point i.
  AxisWeights axis_weights(std::span<const double> u, std::size_t i, int axis) const;
  bool upwind_active(std::size_t i, int axis) const;

 private:
  double indicator(const DerivativeOperator& op, std::span<const double> u, std::size_t i,
                   std::span<double> scratch) const;

  int dim_;
  Vec2 a_;
  WenoConfig cfg_;
  std::vector<bool> inactive_;
  DerivativeOperator central_;
  DerivativeOperator upwind_[2];
};

/// Ids accepted by make_scheme: upwind1, upwind2, central, positive2d,
/// muscl1..muscl4, weno2.
std::vector<std::string> scheme_ids();
std::unique_ptr<SpatialScheme> make_scheme(std::string_view id, const PointCloud& cloud,
                                           const SchemeSetup& setup);

}  // namespace meshless
