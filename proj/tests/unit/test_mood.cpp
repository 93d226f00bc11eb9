#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "meshless/errors.hpp"
#include "meshless/mood.hpp"
#include "meshless/timeint.hpp"

using namespace meshless;

namespace {

PointCloud cloud1d(std::size_t n, double frac, std::uint64_t seed) {
  const Domain d = Domain::periodic_box(1, -5.0, 5.0);
  const double dx = lattice_spacing(d, n);
  return generate_grid(d, GridGenConfig{n, frac * dx, seed});
}

std::vector<double> field(const PointCloud& c, double (*f)(double)) {
  std::vector<double> u(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) u[i] = f(c.position(i)[0]);
  return u;
}

double gauss(double x) { return std::exp(-x * x); }
double step(double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; }

}  // namespace

TEST_CASE("maximum principle check uses the point and its neighbours") {
  const auto c = cloud1d(50, 0.0, 0);
  std::vector<double> u(c.size(), 0.0);
  const std::size_t i = 25;
  const auto nb = c.neighbors(i);
  u[nb.front()] = -1.0;
  u[nb.back()] = 2.0;
  CHECK(dmp_check(u, 2.0, c, i));
  CHECK(dmp_check(u, -1.0, c, i));
  CHECK_FALSE(dmp_check(u, 2.0 + 1e-12, c, i));
  CHECK_FALSE(dmp_check(u, -1.0 - 1e-12, c, i));
  // A point outside the neighbourhood does not widen the bounds.
  u[(i + 20) % c.size()] = 10.0;
  CHECK_FALSE(dmp_check(u, 5.0, c, i));
}

TEST_CASE("flat region check compares the local range with delta cubed") {
  const auto c = cloud1d(50, 0.0, 0);
  const double delta = 0.1;
  const std::size_t i = 10;
  std::vector<double> u(c.size(), 0.3);
  CHECK(flat_region_check(u, c, i, delta));
  u[c.neighbors(i)[0]] = 0.3 + 0.5e-3;
  CHECK(flat_region_check(u, c, i, delta));
  u[c.neighbors(i)[0]] = 0.3 + 2e-3;
  CHECK_FALSE(flat_region_check(u, c, i, delta));
  std::fill(u.begin(), u.end(), 0.0);
  u[i] = delta * delta * delta;
  CHECK(flat_region_check(u, c, i, delta));
}

TEST_CASE("curvature test examples") {
  const double delta = 0.1;
  // Same sign and comparable magnitude: a smooth extremum.
  CHECK(u2_check(std::vector<double>{-2.0, -1.5, -1.2}, delta, false));
  CHECK(u2_check(std::vector<double>{-2.0, -1.5, -1.2}, delta, true));
  // Sign change fails the strict test but passes relaxed when tiny.
  CHECK_FALSE(u2_check(std::vector<double>{-0.01, 0.01}, delta, false));
  CHECK(u2_check(std::vector<double>{-0.01, 0.01}, delta, true));
  // Large opposite curvatures: a genuine discontinuity.
  CHECK_FALSE(u2_check(std::vector<double>{-50.0, 40.0}, delta, true));
  // Same sign but ratio below one half.
  CHECK_FALSE(u2_check(std::vector<double>{1.0, 3.0}, delta, false));
  CHECK_FALSE(u2_check(std::vector<double>{1.0, 3.0}, delta, true));
  // ... unless everything is below delta in the relaxed test.
  CHECK(u2_check(std::vector<double>{0.01, 0.05}, delta, true));
  // All zero passes the ratio test; strict still needs a nonzero product.
  CHECK(u2_check(std::vector<double>{0.0, 0.0, 0.0}, delta, true));
  CHECK_FALSE(u2_check(std::vector<double>{0.0, 0.0, 0.0}, delta, false));
  CHECK(u2_check(std::vector<double>{}, delta, true));
}

TEST_CASE("identical candidate is accepted by the maximum principle everywhere") {
  const auto c = cloud1d(100, 0.5, 3);
  const auto setup = SchemeSetup::defaults(c);
  const auto scheme = make_scheme("muscl2", c, setup);
  const auto curv = CurvatureSource::for_scheme(*scheme, c, setup);
  const auto u = field(c, step);
  const auto rep = detect(u, u, c, curv, MoodConfig::from_cloud(c));
  CHECK(rep.counts[static_cast<std::size_t>(MoodReason::dmp_ok)] == c.size());
  CHECK(rep.rejected_count() == 0);
}

TEST_CASE("a smooth profile advanced by a fourth-order step is never rejected") {
  const auto c = cloud1d(200, 0.5, 5);
  const auto setup = SchemeSetup::defaults(c);
  const auto scheme = make_scheme("muscl4", c, setup);
  const auto curv = CurvatureSource::for_scheme(*scheme, c, setup);
  const auto cfg = MoodConfig::from_cloud(c);
  auto u = field(c, gauss);
  const double dt = 0.05 * euler_timestep(c, setup);
  const auto tab = ButcherTableau::rk4();
  for (int s = 0; s < 10; ++s) {
    const auto next = rk_step(*scheme, u, dt, tab);
    const auto rep = detect(u, next, c, curv, cfg);
    REQUIRE(rep.rejected_count() == 0);
    u = next;
  }
}

TEST_CASE("overshoots at a discontinuity are rejected") {
  const auto c = cloud1d(100, 0.5, 7);
  const auto setup = SchemeSetup::defaults(c);
  const auto scheme = make_scheme("muscl2", c, setup);
  const auto curv = CurvatureSource::for_scheme(*scheme, c, setup);
  const auto u = field(c, step);
  auto cand = u;
  // Push a value just inside the jump above the plateau.
  std::size_t edge = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (u[i] == 1.0 && std::abs(c.position(i)[0] - 1.0) < 0.15) edge = i;
  }
  cand[edge] = 1.2;
  const auto rep = detect(u, cand, c, curv, MoodConfig::from_cloud(c));
  CHECK_FALSE(rep.accepted(edge));
  CHECK(rep.rejected_count() == 1);
  CHECK(rep.rejected_points() == std::vector<std::size_t>{edge});

  const auto strict = detect(u, cand, c, curv, MoodConfig::from_cloud(c, MoodMode::strict_dmp));
  CHECK(strict.rejected_count() == 1);
}

TEST_CASE("strict mode rejects smooth extrema the relaxed mode keeps") {
  const auto c = cloud1d(100, 0.5, 9);
  const auto setup = SchemeSetup::defaults(c);
  const auto curv = CurvatureSource::for_scheme(*make_scheme("muscl2", c, setup), c, setup);
  const auto u = field(c, gauss);
  auto cand = u;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (u[i] > u[peak]) peak = i;
  }
  cand[peak] = u[peak] + 1e-3;
  const auto relaxed = detect(u, cand, c, curv, MoodConfig::from_cloud(c));
  const auto strict = detect(u, cand, c, curv, MoodConfig::from_cloud(c, MoodMode::strict_dmp));
  CHECK(relaxed.accepted(peak));
  CHECK(relaxed.reason[peak] == MoodReason::u2_extremum);
  CHECK_FALSE(strict.accepted(peak));
}

TEST_CASE("enlarging delta never turns an accepted point into a rejected one") {
  const auto c = cloud1d(100, 0.5, 11);
  const auto setup = SchemeSetup::defaults(c);
  const auto curv = CurvatureSource::for_scheme(*make_scheme("muscl2", c, setup), c, setup);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  const auto u = field(c, step);
  std::vector<double> cand(u);
  for (double& v : cand) v += noise(rng);
  auto cfg = MoodConfig::from_cloud(c);
  auto prev = detect(u, cand, c, curv, cfg);
  for (int round = 0; round < 5; ++round) {
    for (auto& d : cfg.delta) d *= 2.0;
    const auto rep = detect(u, cand, c, curv, cfg);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (prev.accepted(i)) REQUIRE(rep.accepted(i));
    }
    CHECK(rep.rejected_count() <= prev.rejected_count());
    prev = rep;
  }
}

TEST_CASE("detection does not depend on point labelling") {
  const auto base = cloud1d(80, 0.5, 13);
  const std::size_t n = base.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(2));
  std::vector<Vec2> pos(n);
  for (std::size_t k = 0; k < n; ++k) pos[k] = base.position(perm[k]);
  const PointCloud shuffled(base.domain(), pos, base.base_spacing(), base.h_max());

  auto run = [](const PointCloud& c, const std::vector<double>& u,
                const std::vector<double>& cand) {
    const auto setup = SchemeSetup::defaults(c);
    const auto curv = CurvatureSource::for_scheme(*make_scheme("muscl1", c, setup), c, setup);
    return detect(u, cand, c, curv, MoodConfig::from_cloud(c));
  };
  const auto u = field(base, step);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  auto cand = u;
  for (double& v : cand) v += noise(rng);
  std::vector<double> up(n), cp(n);
  for (std::size_t k = 0; k < n; ++k) {
    up[k] = u[perm[k]];
    cp[k] = cand[perm[k]];
  }
  const auto a = run(base, u, cand);
  const auto b = run(shuffled, up, cp);
  for (std::size_t k = 0; k < n; ++k) CHECK(b.reason[k] == a.reason[perm[k]]);
}

TEST_CASE("curvature source reuses or fits an operator") {
  const auto c = cloud1d(60, 0.5, 1);
  const auto setup = SchemeSetup::defaults(c);
  const auto m2 = make_scheme("muscl2", c, setup);
  const auto m1 = make_scheme("muscl1", c, setup);
  const auto s2 = CurvatureSource::for_scheme(*m2, c, setup);
  const auto s1 = CurvatureSource::for_scheme(*m1, c, setup);
  CHECK(s1.axes() == 1);
  // A parabola has curvature 2 everywhere away from the periodic seam.
  std::vector<double> u(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) u[i] = c.position(i)[0] * c.position(i)[0];
  std::array<std::vector<double>, 2> k1, k2;
  s1.compute(u, k1);
  s2.compute(u, k2);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c.position(i)[0]) > 4.0) continue;
    CHECK(k1[0][i] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(k2[0][i] == doctest::Approx(2.0).epsilon(1e-9));
  }
  const auto fitted = fit(c, c.neighbors(), FitOptions{1, setup.weight});
  CHECK_THROWS_AS(CurvatureSource(std::make_shared<const DerivativeOperator>(fitted)),
                  InvalidArgument);
}

TEST_CASE("detector validates sizes") {
  const auto c = cloud1d(40, 0.0, 0);
  const auto setup = SchemeSetup::defaults(c);
  const auto curv = CurvatureSource::for_scheme(*make_scheme("muscl2", c, setup), c, setup);
  std::vector<double> u(c.size(), 0.0), shorter(c.size() - 1, 0.0);
  CHECK_THROWS_AS(detect(u, shorter, c, curv, MoodConfig::from_cloud(c)), InvalidArgument);
  MoodConfig bad;
  CHECK_THROWS_AS(detect(u, u, c, curv, bad), InvalidArgument);
}
