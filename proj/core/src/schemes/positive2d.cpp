#include <algorithm>
#include <cmath>
#include <limits>

#include "meshless/errors.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

RotatedCoefficients rotate_coefficients(const Vec2& delta, double alpha, double beta) {
  RotatedCoefficients r;
  r.theta = std::atan2(delta[1], delta[0]);
  const double len = std::hypot(delta[0], delta[1]);
  r.n = {delta[0] / len, delta[1] / len};
  r.s = {-r.n[1], r.n[0]};
  r.alpha_bar = r.n[0] * alpha + r.n[1] * beta;
  r.beta_bar = r.s[0] * alpha + r.s[1] * beta;
  return r;
}

Positive2DScheme::Positive2DScheme(const PointCloud& cloud, const SchemeSetup& setup) {
  if (cloud.dim() != 2) throw InvalidArgument("positive2d requires a 2D cloud");
  FitOptions opts;
  opts.degree = 1;
  opts.weight = setup.weight;
  opts.skip = setup.inactive;
  op_ = fit(cloud, cloud.neighbors(), opts);
  stencils_ = cloud.neighbors();
  coeffs_.assign(stencils_.total(), 0.0);

  const Vec2 a = setup.advection.velocity;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (setup.is_inactive(i)) continue;
    const auto dl = cloud.neighbor_deltas(i);
    const auto ra = op_.row(0, i);
    const auto rb = op_.row(1, i);
    for (std::size_t k = 0; k < dl.size(); ++k) {
      const auto rc = rotate_coefficients(dl[k], ra[k], rb[k]);
      const double an = a[0] * rc.n[0] + a[1] * rc.n[1];
      const double as = a[0] * rc.s[0] + a[1] * rc.s[1];
      const double bs = rc.beta_bar * as;
      coeffs_[stencils_.offset(i) + k] = -(rc.alpha_bar * (an - std::abs(an)) + (bs - std::abs(bs)));
    }
  }
}

double Positive2DScheme::rhs(std::span<const double> u, std::size_t i) const {
  const auto s = stencils_[i];
  const double* c = coeffs_.data() + stencils_.offset(i);
  const double ui = u[i];
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) acc += c[k] * (u[s[k]] - ui);
  return acc;
}

void Positive2DScheme::evaluate(std::span<const double> u, std::span<double> dudt) const {
  for (std::size_t i = 0; i < size(); ++i) dudt[i] = rhs(u, i);
}

void Positive2DScheme::evaluate_at(std::span<const double> u,
                                   std::span<const std::size_t> points,
                                   std::span<double> dudt) const {
  for (std::size_t i : points) dudt[i] = rhs(u, i);
}

double positive2d_max_timestep(const Positive2DScheme& scheme) {
  double worst = 0.0;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    double sum = 0.0;
    for (double c : scheme.coefficients(i)) sum += c;
    worst = std::max(worst, sum);
  }
  return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

double positive2d_max_timestep(const PointCloud& cloud, const SchemeSetup& setup) {
  return positive2d_max_timestep(Positive2DScheme(cloud, setup));
}

}  // namespace meshless
