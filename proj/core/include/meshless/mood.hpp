#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "meshless/mls.hpp"
#include "meshless/pointcloud.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

enum class MoodMode {
  strict_dmp,  // accept only candidates satisfying the discrete maximum principle
  relaxed_u2,  // DMP, then flat-region test, then relaxed curvature test
};

enum class MoodReason : unsigned char { dmp_ok, flat_region, u2_extremum, rejected };

std::string_view to_string(MoodReason r);

struct MoodConfig {
  MoodMode mode = MoodMode::relaxed_u2;
  /// Per-point relaxation length delta_i.
  std::vector<double> delta;

  static MoodConfig from_cloud(const PointCloud& cloud, MoodMode mode = MoodMode::relaxed_u2);
};

struct MoodReport {
  std::vector<MoodReason> reason;
  std::array<std::size_t, 4> counts{};  // indexed by MoodReason

  bool accepted(std::size_t i) const { return reason[i] != MoodReason::rejected; }
  std::size_t rejected_count() const {
    return counts[static_cast<std::size_t>(MoodReason::rejected)];
  }
  std::vector<std::size_t> rejected_points() const;
};

/// min over {i} u C_i of u_prev <= candidate <= max over {i} u C_i.
bool dmp_check(std::span<const double> u_prev, double candidate, const PointCloud& cloud,
               std::size_t i);

/// |max - min| of u_prev over {i} u C_i is at most delta^3.
bool flat_region_check(std::span<const double> u_prev, const PointCloud& cloud, std::size_t i,
                       double delta);

/// Curvature test on the values at i and its neighbours. Strict: signed
/// min*max > 0 and |.|min / |.|max >= 1/2. Relaxed: min*max > -delta and
/// (ratio >= 1/2 or |.|max < delta). An all-zero set passes the ratio test.
bool u2_check(std::span<const double> curvatures, double delta, bool relaxed);

/// Pure second derivatives (one per axis) of u_prev from a central MLS
/// operator of degree >= 2.
class CurvatureSource {
 public:
  explicit CurvatureSource(std::shared_ptr<const DerivativeOperator> op);

  /// Reuses the scheme's central operator when it has second derivatives,
  /// otherwise fits a degree-2 operator on the full neighbourhoods.
  static CurvatureSource for_scheme(const SpatialScheme& scheme, const PointCloud& cloud,
                                    const SchemeSetup& setup);

  int axes() const { return axes_; }
  /// out[axis] receives the curvature field along that axis.
  void compute(std::span<const double> u, std::array<std::vector<double>, 2>& out) const;

 private:
  std::shared_ptr<const DerivativeOperator> op_;
  int axes_ = 1;
  std::array<std::size_t, 2> index_{};
};

MoodReport detect(std::span<const double> u_prev, std::span<const double> u_cand,
                  const PointCloud& cloud, const CurvatureSource& curvature,
                  const MoodConfig& cfg);

/// Detector used by the integrator: (u_prev, u_candidate) -> report.
using MoodDetector =
    std::function<MoodReport(std::span<const double>, std::span<const double>)>;

MoodDetector make_detector(const PointCloud& cloud, CurvatureSource curvature, MoodConfig cfg);

}  // namespace meshless
