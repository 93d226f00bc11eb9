#include "meshless/mood.hpp"

#include <algorithm>
#include <cmath>

#include "meshless/errors.hpp"

namespace meshless {

namespace {

struct Range {
  double lo;
  double hi;
};

Range local_range(std::span<const double> u, const PointCloud& cloud, std::size_t i) {
  Range r{u[i], u[i]};
  for (std::size_t j : cloud.neighbors(i)) {
    r.lo = std::min(r.lo, u[j]);
    r.hi = std::max(r.hi, u[j]);
  }
  return r;
}

}  // namespace

std::string_view to_string(MoodReason r) {
  switch (r) {
    case MoodReason::dmp_ok: return "dmp_ok";
    case MoodReason::flat_region: return "flat_region";
    case MoodReason::u2_extremum: return "u2_extremum";
    case MoodReason::rejected: return "rejected";
  }
  return "?";
}

MoodConfig MoodConfig::from_cloud(const PointCloud& cloud, MoodMode mode) {
  const auto cs = cloud.cell_sizes();
  return MoodConfig{mode, std::vector<double>(cs.begin(), cs.end())};
}

std::vector<std::size_t> MoodReport::rejected_points() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < reason.size(); ++i) {
    if (reason[i] == MoodReason::rejected) out.push_back(i);
  }
  return out;
}

bool dmp_check(std::span<const double> u_prev, double candidate, const PointCloud& cloud,
               std::size_t i) {
  const Range r = local_range(u_prev, cloud, i);
  return r.lo <= candidate && candidate <= r.hi;
}

bool flat_region_check(std::span<const double> u_prev, const PointCloud& cloud, std::size_t i,
                       double delta) {
  const Range r = local_range(u_prev, cloud, i);
  return std::abs(r.hi - r.lo) <= delta * delta * delta;
}

bool u2_check(std::span<const double> curvatures, double delta, bool relaxed) {
  if (curvatures.empty()) return true;
  double lo = curvatures[0], hi = curvatures[0];
  double abs_lo = std::abs(curvatures[0]), abs_hi = abs_lo;
  for (double c : curvatures) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    abs_lo = std::min(abs_lo, std::abs(c));
    abs_hi = std::max(abs_hi, std::abs(c));
  }
  const bool ratio_ok = abs_hi == 0.0 || abs_lo / abs_hi >= 0.5;
  if (!relaxed) return lo * hi > 0.0 && ratio_ok;
  return lo * hi > -delta && (ratio_ok || abs_hi < delta);
}

CurvatureSource::CurvatureSource(std::shared_ptr<const DerivativeOperator> op)
    : op_(std::move(op)) {
  if (!op_ || op_->degree() < 2) {
    throw InvalidArgument("curvature operator needs second derivatives");
  }
  axes_ = op_->dim();
  index_[0] = op_->index_of({2, 0});
  if (axes_ == 2) index_[1] = op_->index_of({0, 2});
}

CurvatureSource CurvatureSource::for_scheme(const SpatialScheme& scheme, const PointCloud& cloud,
                                            const SchemeSetup& setup) {
  if (const auto* m = dynamic_cast<const MusclScheme*>(&scheme)) {
    if (m->central_operator()->degree() >= 2) return CurvatureSource(m->central_operator());
  }
  FitOptions opts;
  opts.degree = 2;
  opts.weight = setup.weight;
  opts.reduce_degree = setup.reduce_degree;
  return CurvatureSource(
      std::make_shared<const DerivativeOperator>(fit(cloud, cloud.neighbors(), opts)));
}

void CurvatureSource::compute(std::span<const double> u,
                              std::array<std::vector<double>, 2>& out) const {
  for (int a = 0; a < axes_; ++a) {
    out[a].resize(u.size());
    op_->apply_field(index_[a], u, out[a]);
  }
}

MoodReport detect(std::span<const double> u_prev, std::span<const double> u_cand,
                  const PointCloud& cloud, const CurvatureSource& curvature,
                  const MoodConfig& cfg) {
  const std::size_t n = cloud.size();
  if (u_prev.size() != n || u_cand.size() != n) throw InvalidArgument("state size mismatch");
  const bool relaxed = cfg.mode == MoodMode::relaxed_u2;
  if (relaxed && cfg.delta.size() != n) throw InvalidArgument("MOOD delta size mismatch");

  MoodReport rep;
  rep.reason.assign(n, MoodReason::rejected);
  std::array<std::vector<double>, 2> curv;
  bool have_curv = false;
  std::vector<double> local;
  for (std::size_t i = 0; i < n; ++i) {
    MoodReason r = MoodReason::rejected;
    if (dmp_check(u_prev, u_cand[i], cloud, i)) {
      r = MoodReason::dmp_ok;
    } else if (relaxed && flat_region_check(u_prev, cloud, i, cfg.delta[i])) {
      r = MoodReason::flat_region;
    } else if (relaxed) {
      if (!have_curv) {
        curvature.compute(u_prev, curv);
        have_curv = true;
      }
      bool ok = true;
      for (int a = 0; a < curvature.axes() && ok; ++a) {
        local.clear();
        local.push_back(curv[a][i]);
        for (std::size_t j : cloud.neighbors(i)) local.push_back(curv[a][j]);
        ok = u2_check(local, cfg.delta[i], true);
      }
      if (ok) r = MoodReason::u2_extremum;
    }
    rep.reason[i] = r;
    ++rep.counts[static_cast<std::size_t>(r)];
  }
  return rep;
}

MoodDetector make_detector(const PointCloud& cloud, CurvatureSource curvature, MoodConfig cfg) {
  return [&cloud, curvature = std::move(curvature), cfg = std::move(cfg)](
             std::span<const double> u_prev, std::span<const double> u_cand) {
    return detect(u_prev, u_cand, cloud, curvature, cfg);
  };
}

}  // namespace meshless
