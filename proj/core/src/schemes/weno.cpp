#include <array>

#include "meshless/errors.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

namespace {

constexpr int kWenoDegree = 2;

}  // namespace

WenoScheme::WenoScheme(const PointCloud& cloud, const SchemeSetup& setup)
    : dim_(cloud.dim()), a_(setup.advection.velocity), cfg_(setup.weno), inactive_(setup.inactive) {
  if (!(cfg_.epsilon > 0.0)) throw InvalidArgument("WENO epsilon must be positive");
  // Stencils that cannot support a degree-2 fit are deactivated (weight 0).
  FitOptions opts;
  opts.degree = kWenoDegree;
  opts.weight = setup.weight;
  opts.allow_unfitted = true;
  opts.skip = setup.inactive;
  central_ = fit(cloud, cloud.neighbors(), opts);
  upwind_[0] = fit(cloud, directional_stencil_set(cloud, a_[0] >= 0.0 ? Side::left : Side::right),
                   opts);
  if (dim_ == 2) {
    upwind_[1] = fit(cloud,
                     directional_stencil_set(cloud, a_[1] >= 0.0 ? Side::bottom : Side::top), opts);
  }
}

bool WenoScheme::upwind_active(std::size_t i, int axis) const {
  return upwind_[axis].point_degree(i) == kWenoDegree;
}

// Oscillation indicator of one stencil at i; scratch receives its derivatives.
// Returns a negative value for a deactivated stencil.
double WenoScheme::indicator(const DerivativeOperator& op, std::span<const double> u,
                             std::size_t i, std::span<double> scratch) const {
  if (op.point_degree(i) != kWenoDegree) return -1.0;
  op.apply_all(i, u, scratch);
  const double h2 = cfg_.spacing * cfg_.spacing;
  if (dim_ == 1) return scratch[0] * scratch[0] * h2 + scratch[1] * scratch[1] * h2 * h2;
  // Order: u_x, u_y, u_xx, u_xy, u_yy.
  return scratch[0] * scratch[0] * h2 + scratch[2] * scratch[2] * h2 * h2 +
         scratch[1] * scratch[1] * h2 + scratch[4] * scratch[4] * h2 * h2 +
         scratch[3] * scratch[3] * h2 * h2;
}

WenoScheme::AxisWeights WenoScheme::axis_weights(std::span<const double> u, std::size_t i,
                                                 int axis) const {
  std::array<double, 5> dc{}, du{};
  const double ic = indicator(central_, u, i, dc);
  const double iu = indicator(upwind_[axis], u, i, du);
  auto beta = [&](double ind) {
    if (ind < 0.0) return 0.0;
    const double q = ind + cfg_.epsilon;
    return 0.5 / (q * q);
  };
  const double bc = beta(ic);
  const double bu = beta(iu);
  const double sum = bc + bu;
  if (!(sum > 0.0)) throw AllStencilsDeactivated(i);
  AxisWeights w;
  w.central = bc / sum;
  w.upwind = bu / sum;
  w.derivative = (bc > 0.0 ? w.central * dc[axis] : 0.0) + (bu > 0.0 ? w.upwind * du[axis] : 0.0);
  return w;
}

void WenoScheme::evaluate(std::span<const double> u, std::span<double> dudt) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!inactive_.empty() && inactive_[i]) {
      dudt[i] = 0.0;
      continue;
    }
    double r = -a_[0] * axis_weights(u, i, 0).derivative;
    if (dim_ == 2) r -= a_[1] * axis_weights(u, i, 1).derivative;
    dudt[i] = r;
  }
}

}  // namespace meshless
