#include <cmath>

#include "meshless/errors.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

MusclScheme::MusclScheme(const PointCloud& cloud, const SchemeSetup& setup, int order)
    : order_(order), inactive_(setup.inactive) {
  if (order < 1) throw InvalidArgument("MUSCL order must be positive");
  // A degree-m Taylor fit (truncation order m+1) gives a scheme of order m.
  FitOptions opts;
  opts.degree = order;
  opts.weight = setup.weight;
  opts.reduce_degree = setup.reduce_degree;
  op_ = std::make_shared<const DerivativeOperator>(fit(cloud, cloud.neighbors(), opts));
  nd_ = op_->derivative_count();

  const auto& st = op_->stencils();
  const auto monos = op_->derivatives();
  const Vec2 a = setup.advection.velocity;
  const bool two_d = cloud.dim() == 2;
  grad_weight_.resize(st.total());
  donor_.resize(st.total());
  taylor_.resize(st.total() * nd_);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto dl = cloud.neighbor_deltas(i);
    const auto ra = op_->row(0, i);
    const auto rb = two_d ? op_->row(1, i) : ra;
    for (std::size_t k = 0; k < dl.size(); ++k) {
      const std::size_t p = st.offset(i) + k;
      const Vec2& d = dl[k];
      const double flow = two_d ? a[0] * d[0] + a[1] * d[1] : a[0] * d[0];
      donor_[p] = flow > 0.0 ? 1 : (flow < 0.0 ? -1 : 0);
      grad_weight_[p] = two_d ? 2.0 * (a[0] * ra[k] + a[1] * rb[k]) : 2.0 * a[0] * ra[k];
      for (std::size_t m = 0; m < nd_; ++m) {
        const auto& mi = monos[m];
        taylor_[p * nd_ + m] = std::pow(0.5 * d[0], mi.x) * std::pow(0.5 * d[1], mi.y) /
                               (factorial(mi.x) * factorial(mi.y));
      }
    }
  }
}

void MusclScheme::derivatives(std::span<const double> u, std::vector<double>& d) const {
  d.resize(size() * nd_);
  for (std::size_t i = 0; i < size(); ++i) {
    op_->apply_all(i, u, std::span<double>(d.data() + i * nd_, nd_));
  }
}

double MusclScheme::midpoint(std::span<const double> u, const std::vector<double>& d,
                             std::size_t i, std::size_t k) const {
  const std::size_t p = op_->stencils().offset(i) + k;
  const std::size_t j = op_->stencil(i)[k];
  const double* t = taylor_.data() + p * nd_;
  const auto monos = op_->derivatives();
  auto from_i = [&]() {
    const double* di = d.data() + i * nd_;
    double v = u[i];
    for (std::size_t m = 0; m < nd_; ++m) v += t[m] * di[m];
    return v;
  };
  // Reconstruction from x_j towards the midpoint uses -d/2, flipping the
  // sign of odd-order terms.
  auto from_j = [&]() {
    const double* dj = d.data() + j * nd_;
    double v = u[j];
    for (std::size_t m = 0; m < nd_; ++m) {
      v += (monos[m].order() % 2 ? -t[m] : t[m]) * dj[m];
    }
    return v;
  };
  switch (donor_[p]) {
    case 1: return from_i();
    case -1: return from_j();
    default: return 0.5 * (from_i() + from_j());
  }
}

double MusclScheme::midpoint_value(std::span<const double> u, std::size_t i,
                                   std::size_t k) const {
  std::vector<double> d;
  derivatives(u, d);
  return midpoint(u, d, i, k);
}

void MusclScheme::evaluate(std::span<const double> u, std::span<double> dudt) const {
  std::vector<double> d;
  derivatives(u, d);
  const auto& st = op_->stencils();
  for (std::size_t i = 0; i < size(); ++i) {
    if (!inactive_.empty() && inactive_[i]) {
      dudt[i] = 0.0;
      continue;
    }
    const std::size_t ns = st[i].size();
    const double* g = grad_weight_.data() + st.offset(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < ns; ++k) acc += g[k] * (midpoint(u, d, i, k) - u[i]);
    dudt[i] = -acc;
  }
}

}  // namespace meshless
