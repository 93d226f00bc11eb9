#include "meshless/timeint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "meshless/csv.hpp"
#include "meshless/errors.hpp"

namespace meshless {

void ButcherTableau::validate() const {
  const std::size_t s = stages();
  if (s == 0 || a.size() != s || c.size() != s) throw InvalidArgument(name + ": bad tableau shape");
  double sum = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    if (a[i].size() != s) throw InvalidArgument(name + ": bad tableau shape");
    for (std::size_t j = i; j < s; ++j) {
      if (a[i][j] != 0.0) throw InvalidArgument(name + ": tableau is not explicit");
    }
    sum += b[i];
  }
  if (std::abs(sum - 1.0) > 1e-14) throw InvalidArgument(name + ": weights do not sum to 1");
}

std::vector<double> ButcherTableau::stability_polynomial() const {
  const std::size_t s = stages();
  std::vector<double> coeffs{1.0};
  std::vector<double> v(s, 1.0), next(s);
  for (std::size_t k = 1; k <= s; ++k) {
    double p = 0.0;
    for (std::size_t i = 0; i < s; ++i) p += b[i] * v[i];
    coeffs.push_back(p);
    for (std::size_t i = 0; i < s; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < s; ++j) acc += a[i][j] * v[j];
      next[i] = acc;
    }
    v.swap(next);
  }
  return coeffs;
}

std::complex<double> ButcherTableau::stability_function(std::complex<double> z) const {
  const auto p = stability_polynomial();
  std::complex<double> r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * z + *it;
  return r;
}

ButcherTableau ButcherTableau::forward_euler() {
  return {"euler", 1, {{0.0}}, {1.0}, {0.0}};
}

ButcherTableau ButcherTableau::ralston2() {
  return {"ralston2", 2, {{0.0, 0.0}, {2.0 / 3.0, 0.0}}, {0.25, 0.75}, {0.0, 2.0 / 3.0}};
}

ButcherTableau ButcherTableau::ssprk3() {
  return {"ssprk3",
          3,
          {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.25, 0.25, 0.0}},
          {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
          {0.0, 1.0, 0.5}};
}

ButcherTableau ButcherTableau::rk4() {
  return {"rk4",
          4,
          {{0.0, 0.0, 0.0, 0.0}, {0.5, 0.0, 0.0, 0.0}, {0.0, 0.5, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}},
          {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0},
          {0.0, 0.5, 0.5, 1.0}};
}

ButcherTableau ButcherTableau::by_name(std::string_view name) {
  if (name == "euler" || name == "fe") return forward_euler();
  if (name == "ralston2" || name == "rk2") return ralston2();
  if (name == "ssprk3" || name == "rk3") return ssprk3();
  if (name == "rk4") return rk4();
  throw InvalidArgument("unknown time integrator '" + std::string(name) + "'");
}

std::vector<double> rk_step(const RhsFunction& f, std::span<const double> u, double dt,
                            const ButcherTableau& tableau) {
  const std::size_t n = u.size();
  const std::size_t s = tableau.stages();
  std::vector<std::vector<double>> k(s, std::vector<double>(n));
  std::vector<double> stage(n);
  for (std::size_t i = 0; i < s; ++i) {
    std::copy(u.begin(), u.end(), stage.begin());
    for (std::size_t j = 0; j < i; ++j) {
      const double aij = tableau.a[i][j];
      if (aij == 0.0) continue;
      for (std::size_t p = 0; p < n; ++p) stage[p] += dt * aij * k[j][p];
    }
    f(stage, k[i]);
  }
  std::vector<double> out(u.begin(), u.end());
  for (std::size_t i = 0; i < s; ++i) {
    const double bi = tableau.b[i];
    if (bi == 0.0) continue;
    for (std::size_t p = 0; p < n; ++p) out[p] += dt * bi * k[i][p];
  }
  return out;
}

std::vector<double> rk_step(const SpatialScheme& scheme, std::span<const double> u, double dt,
                            const ButcherTableau& tableau) {
  return rk_step([&scheme](std::span<const double> x, std::span<double> y) { scheme.evaluate(x, y); },
                 u, dt, tableau);
}

MoodStepResult mood_step(const SpatialScheme& high, const SpatialScheme& fallback,
                         std::span<const double> u, double dt, const ButcherTableau& tableau,
                         const MoodDetector& detector) {
  MoodStepResult res;
  res.u = rk_step(high, u, dt, tableau);
  res.report = detector(u, res.u);
  const auto bad = res.report.rejected_points();
  if (!bad.empty()) {
    std::vector<double> f(u.size(), 0.0);
    fallback.evaluate_at(u, bad, f);
    for (std::size_t i : bad) res.u[i] = u[i] + dt * f[i];
  }
  return res;
}

std::string default_fallback(int dim) { return dim == 1 ? "upwind1" : "positive2d"; }

namespace {

StepDiagnostics diagnose(const PointCloud& cloud, std::span<const double> u, std::size_t step,
                         double t, double dt, std::size_t events) {
  StepDiagnostics d{step, t, dt, 0.0, u[0], u[0], events};
  const auto q = cloud.quadrature_weights();
  for (std::size_t i = 0; i < u.size(); ++i) {
    d.mass += q[i] * u[i];
    d.min = std::min(d.min, u[i]);
    d.max = std::max(d.max, u[i]);
  }
  return d;
}

}  // namespace

IntegrationResult integrate(const PointCloud& cloud, const SchemeSetup& setup,
                            const IntegrationConfig& cfg, std::span<const double> u0,
                            const StepObserver& observer) {
  using clock = std::chrono::steady_clock;
  if (u0.size() != cloud.size()) throw InvalidArgument("initial state size mismatch");
  if (!(cfg.cfl > 0.0)) throw InvalidArgument("CFL number must be positive");
  if (!(cfg.t_end >= 0.0)) throw InvalidArgument("end time must be non-negative");

  const auto t_setup = clock::now();
  const ButcherTableau tableau = ButcherTableau::by_name(cfg.tableau);
  const auto high = make_scheme(cfg.scheme, cloud, setup);
  std::unique_ptr<SpatialScheme> fallback;
  MoodDetector detector;
  if (cfg.mood) {
    fallback = make_scheme(cfg.fallback.empty() ? default_fallback(cloud.dim()) : cfg.fallback,
                           cloud, setup);
    MoodConfig mc = MoodConfig::from_cloud(cloud, cfg.mood_mode);
    detector = make_detector(cloud, CurvatureSource::for_scheme(*high, cloud, setup), mc);
  }
  double dt = cfg.cfl * euler_timestep(cloud, setup);
  // No transport (zero velocity): a single step covers the interval.
  if (std::isinf(dt)) dt = std::max(cfg.t_end, 1.0);
  if (!(dt > 0.0)) throw InvalidArgument("time step is not positive");

  IntegrationResult res;
  res.dt = dt;
  res.u.assign(u0.begin(), u0.end());
  if (cfg.record_steps) res.history.push_back(diagnose(cloud, res.u, 0, 0.0, 0.0, 0));
  const auto t_run = clock::now();
  res.setup_seconds = std::chrono::duration<double>(t_run - t_setup).count();

  double t = 0.0;
  std::size_t step = 0;
  while (t < cfg.t_end) {
    double h = dt;
    // Land exactly on t_end; a sliver below round-off is merged into this step.
    const bool last = t + h >= cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end);
    if (last) h = cfg.t_end - t;
    std::size_t events = 0;
    MoodReport report;
    if (cfg.mood) {
      auto r = mood_step(*high, *fallback, res.u, h, tableau, detector);
      res.u = std::move(r.u);
      report = std::move(r.report);
      events = report.rejected_count();
    } else {
      res.u = rk_step(*high, res.u, h, tableau);
    }
    ++step;
    t = last ? cfg.t_end : t + h;
    for (double v : res.u) {
      if (!std::isfinite(v) || std::abs(v) > cfg.blowup_bound) throw NonFiniteState(step);
    }
    res.mood_events += events;
    const auto d = diagnose(cloud, res.u, step, t, h, events);
    if (cfg.record_steps) res.history.push_back(d);
    if (observer) observer(d, res.u, cfg.mood ? &report : nullptr);
  }
  res.t = t;
  res.steps = step;
  res.run_seconds = std::chrono::duration<double>(clock::now() - t_run).count();
  return res;
}

void write_diagnostics_csv(std::ostream& os, std::span<const StepDiagnostics> steps) {
  csv::Writer w(os, {"step", "t", "dt", "mass", "min", "max", "mood_events"});
  for (const auto& d : steps) w.row(d.step, d.t, d.dt, d.mass, d.min, d.max, d.mood_events);
}

}  // namespace meshless
