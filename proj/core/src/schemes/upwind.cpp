#include <algorithm>
#include <cmath>
#include <limits>

#include "meshless/errors.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

namespace {

struct UpwindSums {
  double first = 0.0;   // sum w dx
  double second = 0.0;  // sum w dx^2
};

UpwindSums upwind_sums(const PointCloud& cloud, std::size_t i, double a, const WeightConfig& w) {
  UpwindSums s;
  const auto dl = cloud.neighbor_deltas(i);
  for (const auto& d : dl) {
    if (a * d[0] < 0.0) {
      const double wk = weight(d[0] * d[0], w);
      s.first += wk * d[0];
      s.second += wk * d[0] * d[0];
    }
  }
  return s;
}

}  // namespace

Upwind1Scheme1D::Upwind1Scheme1D(const PointCloud& cloud, const SchemeSetup& setup)
    : a_(setup.advection.velocity[0]) {
  if (cloud.dim() != 1) throw InvalidArgument("upwind1 (closed form) is a 1D scheme");
  if (a_ == 0.0) {
    // No transport: every stencil is empty and the rhs vanishes.
    stencils_ = StencilSet(std::vector<std::vector<std::size_t>>(cloud.size()));
    return;
  }
  std::vector<std::vector<std::size_t>> lists(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (setup.is_inactive(i)) continue;
    lists[i] = upwind_stencil_1d(cloud, i, a_);
    if (lists[i].empty()) throw EmptyUpwindStencil(i);
  }
  stencils_ = StencilSet(lists);
  coeffs_.resize(stencils_.total());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto s = stencils_[i];
    if (s.empty()) continue;
    double denom = 0.0;
    for (std::size_t j : s) {
      const double d = cloud.delta(i, j)[0];
      denom += weight(d * d, setup.weight) * d * d;
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double d = cloud.delta(i, s[k])[0];
      coeffs_[stencils_.offset(i) + k] = weight(d * d, setup.weight) * d / denom;
    }
  }
}

double Upwind1Scheme1D::rhs(std::span<const double> u, std::size_t i) const {
  const auto s = stencils_[i];
  const double* c = coeffs_.data() + stencils_.offset(i);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) acc += c[k] * (u[s[k]] - u[i]);
  return -a_ * acc;
}

void Upwind1Scheme1D::evaluate(std::span<const double> u, std::span<double> dudt) const {
  for (std::size_t i = 0; i < size(); ++i) dudt[i] = rhs(u, i);
}

void Upwind1Scheme1D::evaluate_at(std::span<const double> u,
                                  std::span<const std::size_t> points,
                                  std::span<double> dudt) const {
  for (std::size_t i : points) dudt[i] = rhs(u, i);
}

double max_timestep_upwind1(const PointCloud& cloud, const SchemeSetup& setup) {
  if (cloud.dim() != 1) throw InvalidArgument("max_timestep_upwind1 requires a 1D cloud");
  const double a = setup.advection.velocity[0];
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (setup.is_inactive(i)) continue;
    const auto s = upwind_sums(cloud, i, a, setup.weight);
    if (s.second == 0.0) throw EmptyUpwindStencil(i);
    dt = std::min(dt, -s.second / (a * s.first));
  }
  return dt;
}

UpwindScheme::UpwindScheme(const PointCloud& cloud, const SchemeSetup& setup, int degree)
    : degree_(degree), n_(cloud.size()), a_(setup.advection.velocity), inactive_(setup.inactive) {
  if (degree < 1) throw InvalidArgument("upwind degree must be positive");
  FitOptions opts;
  opts.degree = degree;
  opts.weight = setup.weight;
  opts.reduce_degree = setup.reduce_degree;
  opts.skip = setup.inactive;

  auto check_nonempty = [&](const StencilSet& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!setup.is_inactive(i) && s[i].empty()) throw EmptyUpwindStencil(i);
    }
  };

  if (cloud.dim() == 1) {
    if (a_[0] != 0.0) {
      auto st = upwind_stencils_1d(cloud, a_[0]);
      check_nonempty(st);
      x_op_ = fit(cloud, st, opts);
    }
    return;
  }
  if (a_[0] != 0.0) {
    auto st = directional_stencil_set(cloud, a_[0] > 0.0 ? Side::left : Side::right);
    check_nonempty(st);
    x_op_ = fit(cloud, st, opts);
  }
  if (a_[1] != 0.0) {
    auto st = directional_stencil_set(cloud, a_[1] > 0.0 ? Side::bottom : Side::top);
    check_nonempty(st);
    y_op_ = fit(cloud, st, opts);
  }
}

double UpwindScheme::rhs(std::span<const double> u, std::size_t i) const {
  if (!inactive_.empty() && inactive_[i]) return 0.0;
  double r = 0.0;
  if (a_[0] != 0.0) r -= a_[0] * x_op_.apply(std::size_t{0}, i, u);
  if (a_[1] != 0.0 && y_op_.size() > 0) r -= a_[1] * y_op_.apply(std::size_t{1}, i, u);
  return r;
}

void UpwindScheme::evaluate(std::span<const double> u, std::span<double> dudt) const {
  for (std::size_t i = 0; i < n_; ++i) dudt[i] = rhs(u, i);
}

void UpwindScheme::evaluate_at(std::span<const double> u, std::span<const std::size_t> points,
                               std::span<double> dudt) const {
  for (std::size_t i : points) dudt[i] = rhs(u, i);
}

}  // namespace meshless
