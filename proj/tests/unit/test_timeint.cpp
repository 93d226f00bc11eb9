#include <doctest.h>

#include <cmath>
#include <sstream>

#include "meshless/errors.hpp"
#include "meshless/timeint.hpp"

using namespace meshless;

namespace {

PointCloud cloud1d(std::size_t n, double frac, std::uint64_t seed) {
  const Domain d = Domain::periodic_box(1, -5.0, 5.0);
  const double dx = lattice_spacing(d, n);
  return generate_grid(d, GridGenConfig{n, frac * dx, seed});
}

std::vector<double> step_profile(const PointCloud& c) {
  std::vector<double> u(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) u[i] = std::abs(c.position(i)[0]) < 1.0 ? 1.0 : 0.0;
  return u;
}

double taylor(int terms, double z) {
  double sum = 0.0, term = 1.0;
  for (int k = 0; k <= terms; ++k) {
    sum += term;
    term *= z / (k + 1);
  }
  return sum;
}

MoodReport uniform_report(std::size_t n, MoodReason r) {
  MoodReport rep;
  rep.reason.assign(n, r);
  rep.counts[static_cast<std::size_t>(r)] = n;
  return rep;
}

}  // namespace

TEST_CASE("tableaus are explicit and consistent") {
  for (const char* id : {"euler", "ralston2", "ssprk3", "rk4", "rk2", "rk3"}) {
    const auto t = ButcherTableau::by_name(id);
    CHECK_NOTHROW(t.validate());
    double sum = 0.0;
    for (double b : t.b) sum += b;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t i = 0; i < t.stages(); ++i) {
      double row = 0.0;
      for (double a : t.a[i]) row += a;
      CHECK(row == doctest::Approx(t.c[i]).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(ButcherTableau::by_name("dopri5"), InvalidArgument);
  auto implicit = ButcherTableau::forward_euler();
  implicit.a[0][0] = 1.0;
  CHECK_THROWS_AS(implicit.validate(), InvalidArgument);
  auto bad_sum = ButcherTableau::rk4();
  bad_sum.b[0] = 0.5;
  CHECK_THROWS_AS(bad_sum.validate(), InvalidArgument);
}

TEST_CASE("stability polynomials are truncated exponentials of the method order") {
  const std::pair<const char*, int> cases[] = {
      {"euler", 1}, {"ralston2", 2}, {"ssprk3", 3}, {"rk4", 4}};
  for (const auto& [id, order] : cases) {
    const auto t = ButcherTableau::by_name(id);
    CHECK(t.order == order);
    const auto p = t.stability_polynomial();
    REQUIRE(p.size() == t.stages() + 1);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      CHECK(std::abs(p[k] - 1.0 / fact) <= 1e-14);
    }
    for (double z : {-2.0, -0.3, 0.7}) {
      CHECK(std::abs(t.stability_function(z).real() - taylor(order, z)) <= 1e-14);
    }
  }
}

TEST_CASE("one step on the scalar linear equation reproduces R(z)") {
  const double lambda = -1.7, dt = 0.3;
  RhsFunction f = [lambda](std::span<const double> u, std::span<double> out) {
    out[0] = lambda * u[0];
  };
  for (const char* id : {"euler", "ralston2", "ssprk3", "rk4"}) {
    const auto t = ButcherTableau::by_name(id);
    const std::vector<double> u0{2.0};
    const auto u1 = rk_step(f, u0, dt, t);
    CHECK(u1[0] == doctest::Approx(2.0 * t.stability_function(lambda * dt).real()).epsilon(1e-14));
    CHECK(u1[0] == doctest::Approx(2.0 * taylor(t.order, lambda * dt)).epsilon(1e-14));
  }
}

TEST_CASE("zero right-hand side leaves the state unchanged") {
  RhsFunction zero = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  const std::vector<double> u{0.1, -3.0, 7.5};
  for (const char* id : {"euler", "ralston2", "ssprk3", "rk4"}) {
    CHECK(rk_step(zero, u, 0.5, ButcherTableau::by_name(id)) == u);
  }
}

TEST_CASE("MOOD step with every point accepted equals the plain step") {
  const auto c = cloud1d(100, 0.5, 2);
  const auto setup = SchemeSetup::defaults(c);
  const auto high = make_scheme("muscl2", c, setup);
  const auto low = make_scheme("upwind1", c, setup);
  const auto u = step_profile(c);
  const double dt = 0.2 * euler_timestep(c, setup);
  const auto tab = ButcherTableau::ssprk3();
  MoodDetector accept_all = [](std::span<const double> a, std::span<const double>) {
    return uniform_report(a.size(), MoodReason::dmp_ok);
  };
  MoodDetector reject_all = [](std::span<const double> a, std::span<const double>) {
    return uniform_report(a.size(), MoodReason::rejected);
  };
  const auto plain = rk_step(*high, u, dt, tab);
  CHECK(mood_step(*high, *low, u, dt, tab, accept_all).u == plain);

  const auto fallback = rk_step(*low, u, dt, ButcherTableau::forward_euler());
  const auto all_low = mood_step(*high, *low, u, dt, tab, reject_all);
  CHECK(all_low.u == fallback);
  CHECK(all_low.report.rejected_count() == c.size());
}

TEST_CASE("a MOOD step from a step profile satisfies the local maximum principle") {
  const auto c = cloud1d(100, 0.5, 4);
  const auto setup = SchemeSetup::defaults(c);
  const auto high = make_scheme("muscl2", c, setup);
  const auto low = make_scheme("upwind1", c, setup);
  const auto u = step_profile(c);
  const double dt = 0.5 * euler_timestep(c, setup);
  const auto det = make_detector(c, CurvatureSource::for_scheme(*high, c, setup),
                                 MoodConfig::from_cloud(c, MoodMode::strict_dmp));
  const auto r = mood_step(*high, *low, u, dt, ButcherTableau::ssprk3(), det);
  CHECK(r.report.rejected_count() > 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool ok = dmp_check(u, r.u[i], c, i);
    CHECK(ok);
  }
}

TEST_CASE("integration with zero velocity keeps the initial state") {
  const auto c = cloud1d(60, 0.5, 1);
  auto setup = SchemeSetup::defaults(c);
  setup.advection.velocity = {0.0, 0.0};
  std::vector<double> u0(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) u0[i] = std::sin(c.position(i)[0]);
  IntegrationConfig cfg;
  cfg.scheme = "central";
  cfg.t_end = 1.0;
  const auto r = integrate(c, setup, cfg, u0);
  CHECK(r.u == u0);
  CHECK(r.t == 1.0);
}

TEST_CASE("first-order upwind with forward Euler below the bound stays within the data") {
  const auto c = cloud1d(100, 0.5, 8);
  const auto setup = SchemeSetup::defaults(c);
  IntegrationConfig cfg;
  cfg.scheme = "upwind1";
  cfg.tableau = "euler";
  cfg.cfl = 0.99;
  cfg.t_end = 10.0;
  const auto u0 = step_profile(c);
  double lo = 0.0, hi = 1.0;
  const auto r = integrate(c, setup, cfg, u0,
                           [&](const StepDiagnostics& d, std::span<const double>, const MoodReport*) {
                             lo = std::min(lo, d.min);
                             hi = std::max(hi, d.max);
                           });
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
  CHECK(r.t == 10.0);
  CHECK(r.history.size() == r.steps + 1);
  CHECK(r.history.front().step == 0);
}

TEST_CASE("the last step lands exactly on the end time") {
  const auto c = cloud1d(50, 0.5, 3);
  const auto setup = SchemeSetup::defaults(c);
  IntegrationConfig cfg;
  cfg.scheme = "muscl2";
  cfg.cfl = 0.3;
  cfg.t_end = 0.123456;
  const auto r = integrate(c, setup, cfg, step_profile(c));
  CHECK(r.t == cfg.t_end);
  CHECK(r.history.back().t == cfg.t_end);
  CHECK(r.history.back().dt <= r.dt);
  CHECK(r.dt == doctest::Approx(0.3 * euler_timestep(c, setup)).epsilon(1e-15));
}

TEST_CASE("integration is deterministic") {
  const auto c = cloud1d(80, 0.5, 5);
  const auto setup = SchemeSetup::defaults(c);
  IntegrationConfig cfg;
  cfg.scheme = "muscl4";
  cfg.mood = true;
  cfg.tableau = "rk4";
  cfg.cfl = 0.5;
  cfg.t_end = 2.0;
  const auto u0 = step_profile(c);
  const auto a = integrate(c, setup, cfg, u0);
  const auto b = integrate(c, setup, cfg, u0);
  CHECK(a.u == b.u);
  CHECK(a.mood_events == b.mood_events);
  CHECK(a.mood_events > 0);
}

TEST_CASE("MOOD keeps the solution inside the initial bounds where the raw scheme does not") {
  const auto c = cloud1d(100, 0.5, 6);
  const auto setup = SchemeSetup::defaults(c);
  IntegrationConfig cfg;
  cfg.scheme = "muscl2";
  cfg.cfl = 0.3;
  cfg.t_end = 2.0;
  const auto u0 = step_profile(c);
  const auto raw = integrate(c, setup, cfg, u0);
  cfg.mood = true;
  cfg.mood_mode = MoodMode::strict_dmp;
  const auto limited = integrate(c, setup, cfg, u0);
  const auto [rlo, rhi] = std::minmax_element(raw.u.begin(), raw.u.end());
  CHECK((*rlo < -1e-3 || *rhi > 1.0 + 1e-3));
  for (double v : limited.u) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("integration rejects bad configurations and detects blow-up") {
  const auto c = cloud1d(40, 0.5, 1);
  const auto setup = SchemeSetup::defaults(c);
  const auto u0 = step_profile(c);
  IntegrationConfig cfg;
  cfg.cfl = 0.0;
  CHECK_THROWS_AS(integrate(c, setup, cfg, u0), InvalidArgument);
  cfg.cfl = 0.5;
  cfg.t_end = -1.0;
  CHECK_THROWS_AS(integrate(c, setup, cfg, u0), InvalidArgument);
  cfg.t_end = 1.0;
  CHECK_THROWS_AS(integrate(c, setup, cfg, std::vector<double>(3, 0.0)), InvalidArgument);
  cfg.tableau = "nope";
  CHECK_THROWS_AS(integrate(c, setup, cfg, u0), InvalidArgument);

  // Forward Euler far beyond its bound amplifies the jump until it trips.
  cfg.tableau = "euler";
  cfg.scheme = "upwind1";
  cfg.cfl = 5.0;
  cfg.t_end = 100.0;
  cfg.blowup_bound = 1e3;
  CHECK_THROWS_AS(integrate(c, setup, cfg, u0), NonFiniteState);
}

TEST_CASE("diagnostics CSV") {
  std::ostringstream os;
  const StepDiagnostics d{3, 0.5, 0.25, 2.0, -0.1, 1.1, 4};
  write_diagnostics_csv(os, std::span<const StepDiagnostics>(&d, 1));
  CHECK(os.str() == "step,t,dt,mass,min,max,mood_events\n3,0.5,0.25,2,-0.1,1.1,4\n");
  std::ostringstream empty;
  write_diagnostics_csv(empty, {});
  CHECK(empty.str() == "step,t,dt,mass,min,max,mood_events\n");
}
