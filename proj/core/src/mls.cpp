#include "meshless/mls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <ostream>

#include "meshless/csv.hpp"
#include "meshless/errors.hpp"

namespace meshless {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

struct PointFit {
  bool ok = false;
  Eigen::MatrixXd rows;  // derivative x stencil
};

PointFit fit_point(std::span<const Vec2> deltas, std::span<const MultiIndex> monos,
                   double scale, const WeightConfig& wcfg, double min_rcond,
                   std::size_t surplus) {
  PointFit out;
  const auto ns = static_cast<Eigen::Index>(deltas.size());
  const auto nm = static_cast<Eigen::Index>(monos.size());
  if (ns < nm + static_cast<Eigen::Index>(surplus)) return out;

  Eigen::MatrixXd a(ns, nm);
  Eigen::VectorXd w(ns);
  for (Eigen::Index r = 0; r < ns; ++r) {
    const Vec2& d = deltas[static_cast<std::size_t>(r)];
    w(r) = weight(norm2(d), wcfg);
    const double xi = d[0] / scale;
    const double eta = d[1] / scale;
    for (Eigen::Index c = 0; c < nm; ++c) {
      const MultiIndex& m = monos[static_cast<std::size_t>(c)];
      a(r, c) = ipow(xi, m.x) * ipow(eta, m.y) / (factorial(m.x) * factorial(m.y));
    }
  }
  const Eigen::MatrixXd atw = a.transpose() * w.asDiagonal();
  const Eigen::MatrixXd gram = atw * a;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
  const double rc = lu.rcond();
  if (!(rc >= min_rcond)) return out;

  out.rows = lu.solve(atw);
  for (Eigen::Index c = 0; c < nm; ++c) {
    out.rows.row(c) /= ipow(scale, monos[static_cast<std::size_t>(c)].order());
  }
  out.ok = out.rows.allFinite();
  return out;
}

}  // namespace

WeightConfig WeightConfig::defaults(int dim, double dx, double h_max) {
  return WeightConfig{dim == 1 ? 1.0 / (dx * dx) : 6.0 / (h_max * h_max)};
}

double weight(const PointCloud& cloud, std::size_t i, std::size_t j, const WeightConfig& cfg) {
  return weight(norm2(cloud.delta(i, j)), cfg);
}

std::vector<MultiIndex> taylor_monomials(int dim, int degree) {
  std::vector<MultiIndex> out;
  for (int total = 1; total <= degree; ++total) {
    if (dim == 1) {
      out.push_back({total, 0});
    } else {
      for (int x = total; x >= 0; --x) out.push_back({x, total - x});
    }
  }
  return out;
}

DerivativeOperator::DerivativeOperator(int dim, int degree, StencilSet stencils,
                                       std::vector<double> coeffs,
                                       std::vector<int> point_degree)
    : dim_(dim),
      degree_(degree),
      derivs_(taylor_monomials(dim, degree)),
      stencils_(std::move(stencils)),
      coeffs_(std::move(coeffs)),
      point_degree_(std::move(point_degree)) {}

std::size_t DerivativeOperator::index_of(MultiIndex d) const {
  auto it = std::find(derivs_.begin(), derivs_.end(), d);
  if (it == derivs_.end()) throw InvalidArgument("derivative not fitted by this operator");
  return static_cast<std::size_t>(it - derivs_.begin());
}

bool DerivativeOperator::has(MultiIndex d) const {
  return std::find(derivs_.begin(), derivs_.end(), d) != derivs_.end();
}

double DerivativeOperator::apply(std::size_t d, std::size_t i, std::span<const double> u) const {
  const auto s = stencils_[i];
  const auto c = row(d, i);
  const double ui = u[i];
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) acc += c[k] * (u[s[k]] - ui);
  return acc;
}

void DerivativeOperator::apply_all(std::size_t i, std::span<const double> u,
                                   std::span<double> out) const {
  const auto s = stencils_[i];
  const std::size_t ns = s.size();
  const double* c = coeffs_.data() + stencils_.offset(i) * derivs_.size();
  const double ui = u[i];
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(derivs_.size()), 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    const double du = u[s[k]] - ui;
    for (std::size_t d = 0; d < derivs_.size(); ++d) out[d] += c[d * ns + k] * du;
  }
}

void DerivativeOperator::apply_field(std::size_t d, std::span<const double> u,
                                     std::span<double> out) const {
  for (std::size_t i = 0; i < size(); ++i) out[i] = apply(d, i, u);
}

DerivativeOperator fit(const PointCloud& cloud, const StencilSet& stencils,
                       const FitOptions& opts) {
  if (opts.degree < 1) throw InvalidArgument("MLS degree must be at least 1");
  if (!(opts.weight.alpha > 0.0)) throw InvalidArgument("weight alpha must be positive");
  if (stencils.size() != cloud.size()) throw InvalidArgument("stencil set size mismatch");

  const auto monos = taylor_monomials(cloud.dim(), opts.degree);
  const std::size_t nd = monos.size();
  std::vector<double> coeffs(stencils.total() * nd, 0.0);
  std::vector<int> point_degree(cloud.size(), 0);
  const double scale = cloud.h_max();

  std::vector<Vec2> deltas;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!opts.skip.empty() && opts.skip[i]) continue;
    const auto s = stencils[i];
    deltas.clear();
    for (std::size_t j : s) deltas.push_back(cloud.delta(i, j));

    PointFit pf;
    int deg = opts.degree;
    for (; deg >= 1; --deg) {
      const std::size_t nm = deg == opts.degree ? nd : taylor_monomials(cloud.dim(), deg).size();
      // Exactly determined fits interpolate; with two nearly coincident
      // points their rows blow up, so reduction insists on a surplus.
      const std::size_t surplus = opts.reduce_degree && deg > 1 ? 1 : 0;
      pf = fit_point(deltas, std::span<const MultiIndex>(monos.data(), nm), scale, opts.weight,
                     opts.min_rcond, surplus);
      if (pf.ok || !opts.reduce_degree) break;
    }
    if (!pf.ok && opts.allow_unfitted) continue;
    if (!pf.ok) {
      throw SingularStencil(i, s.size() < nd ? "stencil has " + std::to_string(s.size()) +
                                                   " points for " + std::to_string(nd) +
                                                   " unknowns"
                                             : "ill-conditioned Gram matrix");
    }
    point_degree[i] = deg;
    const std::size_t ns = s.size();
    double* block = coeffs.data() + stencils.offset(i) * nd;
    for (Eigen::Index d = 0; d < pf.rows.rows(); ++d) {
      for (std::size_t k = 0; k < ns; ++k) {
        block[static_cast<std::size_t>(d) * ns + k] = pf.rows(d, static_cast<Eigen::Index>(k));
      }
    }
  }
  return DerivativeOperator(cloud.dim(), opts.degree, stencils, std::move(coeffs),
                            std::move(point_degree));
}

void write_operator_csv(std::ostream& os, const DerivativeOperator& op) {
  csv::Writer w(os, {"point", "dx", "dy", "neighbor", "coefficient"});
  for (std::size_t i = 0; i < op.size(); ++i) {
    const auto s = op.stencil(i);
    for (std::size_t d = 0; d < op.derivative_count(); ++d) {
      const auto r = op.row(d, i);
      const auto m = op.derivatives()[d];
      for (std::size_t k = 0; k < s.size(); ++k) w.row(i, m.x, m.y, s[k], r[k]);
    }
  }
}

}  // namespace meshless
