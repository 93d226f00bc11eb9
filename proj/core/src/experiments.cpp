#include "meshless/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "meshless/csv.hpp"
#include "meshless/errors.hpp"
#include "meshless/stability.hpp"

namespace meshless {

InitialCondition InitialCondition::by_id(std::string_view id) {
  InitialCondition ic;
  ic.id = std::string(id);
  if (id == "gauss1d") {
    ic.profile = [](const Vec2& x) { return std::exp(-x[0] * x[0]); };
  } else if (id == "step1d") {
    ic.profile = [](const Vec2& x) { return x[0] > 0.0 ? 1.0 : 0.0; };
  } else if (id == "gauss2d") {
    ic.dim = 2;
    ic.profile = [](const Vec2& x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); };
  } else if (id == "box2d") {
    ic.dim = 2;
    ic.profile = [](const Vec2& x) {
      return (x[0] > -0.5 && x[0] < 0.5 && x[1] > -0.5 && x[1] < 0.5) ? 1.0 : 0.0;
    };
  } else if (id == "dirichlet_shock") {
    ic.profile = [](const Vec2& x) { return x[0] < -2.0 ? 1.0 : 0.0; };
    ic.inflow = 0.5;
  } else {
    throw InvalidArgument("unknown initial condition '" + std::string(id) + "'");
  }
  return ic;
}

Domain InitialCondition::domain() const {
  return bounded() ? Domain::bounded_interval(-5.0, 5.0) : Domain::periodic_box(dim, -5.0, 5.0);
}

std::vector<std::string> initial_condition_ids() {
  return {"gauss1d", "step1d", "gauss2d", "box2d", "dirichlet_shock"};
}

namespace {

std::size_t inflow_node(const PointCloud& cloud) {
  const auto pos = cloud.positions();
  return static_cast<std::size_t>(
      std::min_element(pos.begin(), pos.end(),
                       [](const Vec2& a, const Vec2& b) { return a[0] < b[0]; }) -
      pos.begin());
}

void check_dim(const InitialCondition& ic, const PointCloud& cloud) {
  if (ic.dim != cloud.dim()) throw InvalidArgument("initial condition dimension mismatch");
}

}  // namespace

std::vector<double> sample(const InitialCondition& ic, const PointCloud& cloud) {
  check_dim(ic, cloud);
  std::vector<double> u(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) u[i] = ic.profile(cloud.position(i));
  if (ic.inflow) u[inflow_node(cloud)] = *ic.inflow;
  return u;
}

std::vector<double> exact_solution(const InitialCondition& ic, const PointCloud& cloud,
                                   const Vec2& velocity, double t) {
  check_dim(ic, cloud);
  const Domain& d = cloud.domain();
  // Reduce the shift first so a whole number of periods maps points onto
  // themselves exactly.
  Vec2 shift{0.0, 0.0};
  for (int a = 0; a < d.dim; ++a) {
    shift[a] = velocity[a] * t;
    if (d.periodic[a]) shift[a] = std::fmod(shift[a], d.length(a));
  }
  std::vector<double> u(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Vec2 x = cloud.position(i);
    bool from_inflow = false;
    for (int a = 0; a < d.dim; ++a) {
      x[a] -= shift[a];
      if (d.periodic[a]) {
        if (x[a] < d.lo[a]) x[a] += d.length(a);
        if (x[a] >= d.hi[a]) x[a] -= d.length(a);
      } else if (x[a] < d.lo[a]) {
        from_inflow = true;
      }
    }
    u[i] = from_inflow && ic.inflow ? *ic.inflow : ic.profile(x);
  }
  if (ic.inflow) u[inflow_node(cloud)] = *ic.inflow;
  return u;
}

ErrorNorm error_rel_l2(std::span<const double> u, std::span<const double> exact) {
  if (u.size() != exact.size()) throw InvalidArgument("field size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += (u[i] - exact[i]) * (u[i] - exact[i]);
    den += exact[i] * exact[i];
  }
  if (den == 0.0) return {std::sqrt(num), true};
  return {std::sqrt(num / den), false};
}

double total_mass(std::span<const double> u, const PointCloud& cloud) {
  const auto q = cloud.quadrature_weights();
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m += q[i] * u[i];
  return m;
}

double convergence_order(std::span<const double> n, std::span<const double> err,
                         std::size_t finest) {
  if (n.size() != err.size()) throw InvalidArgument("size mismatch in order fit");
  const std::size_t k = std::min(finest, n.size());
  if (k < 2) throw InvalidArgument("order fit needs at least two points");
  const std::size_t first = n.size() - k;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = first; i < n.size(); ++i) {
    sx += std::log(n[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / static_cast<double>(k), my = sy / static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < n.size(); ++i) {
    const double dx = std::log(n[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

std::string Combo::label() const {
  std::string s = scheme + "+" + tableau;
  if (mood) s += "+mood";
  return s;
}

Combo Combo::parse(std::string_view text, double default_cfl, std::string_view default_tableau) {
  Combo c;
  c.cfl = default_cfl;
  c.tableau = std::string(default_tableau);
  if (const auto at = text.find('@'); at != std::string_view::npos) {
    c.cfl = csv::parse_double(text.substr(at + 1));
    text = text.substr(0, at);
  }
  std::size_t k = 0;
  while (!text.empty()) {
    const auto plus = text.find('+');
    const auto tok = text.substr(0, plus);
    if (tok.empty()) throw InvalidArgument("empty field in combination");
    if (k == 0) {
      c.scheme = std::string(tok);
    } else if (tok == "mood") {
      c.mood = true;
    } else {
      c.tableau = ButcherTableau::by_name(tok).name;
    }
    ++k;
    text = plus == std::string_view::npos ? std::string_view{} : text.substr(plus + 1);
  }
  if (c.scheme.empty()) throw InvalidArgument("combination without a scheme");
  if (!(c.cfl > 0.0)) throw InvalidArgument("CFL number must be positive");
  return c;
}

std::vector<Combo> efficiency_combos_1d() {
  return {{"upwind1", "euler", false, 0.99},  {"upwind2", "ralston2", true, 0.3},
          {"weno2", "ralston2", false, 0.7},  {"muscl2", "ralston2", true, 0.75},
          {"muscl4", "rk4", true, 0.7},       {"muscl2", "ralston2", false, 0.75},
          {"muscl4", "rk4", false, 0.7}};
}

std::vector<Combo> efficiency_combos_2d() {
  return {{"positive2d", "euler", false, 0.5}, {"upwind2", "ssprk3", false, 0.5},
          {"weno2", "ssprk3", false, 0.5},     {"muscl1", "ssprk3", true, 0.5},
          {"muscl2", "ssprk3", true, 0.5},     {"muscl2", "ssprk3", false, 0.5}};
}

std::uint64_t run_seed(std::uint64_t master, std::size_t k) { return derive_seed(master, k); }

namespace {

CaseSpec case_spec(std::string init, std::size_t n, double randomness, std::uint64_t seed,
                   double t_end, const ModelParams& params) {
  CaseSpec s;
  s.init = std::move(init);
  s.n = n;
  s.randomness = randomness;
  s.seed = seed;
  s.t_end = t_end;
  s.params = params;
  return s;
}

}  // namespace

ExperimentRecord run_case(const CaseSpec& spec, const Combo& combo, RunOutputs* out,
                          const StepObserver& observer) {
  const InitialCondition ic = InitialCondition::by_id(spec.init);
  const Domain domain = ic.domain();
  const double dx = lattice_spacing(domain, spec.n);
  const PointCloud cloud = generate_grid(domain, GridGenConfig{spec.n, spec.randomness * dx, spec.seed},
                                         spec.params.neighbor_radius(domain.dim, dx));
  SchemeSetup setup = spec.params.setup(cloud);
  if (ic.bounded()) {
    setup.inactive.assign(cloud.size(), false);
    setup.inactive[inflow_node(cloud)] = true;
    setup.reduce_degree = true;
  }

  ExperimentRecord rec;
  rec.label = combo.label();
  rec.scheme = combo.scheme;
  rec.tableau = combo.tableau;
  rec.mood = combo.mood;
  rec.dim = cloud.dim();
  rec.n = spec.n;
  rec.points = cloud.size();
  rec.randomness = spec.randomness;
  rec.seed = spec.seed;
  rec.cfl = combo.cfl;
  rec.t_end = spec.t_end;

  IntegrationConfig icfg;
  icfg.scheme = combo.scheme;
  icfg.tableau = combo.tableau;
  icfg.cfl = combo.cfl;
  icfg.t_end = spec.t_end;
  icfg.mood = combo.mood;
  icfg.blowup_bound = spec.blowup_bound;
  icfg.record_steps = out != nullptr;

  const std::vector<double> u0 = sample(ic, cloud);
  const double m0 = total_mass(u0, cloud);
  if (out) {
    out->positions.assign(cloud.positions().begin(), cloud.positions().end());
    out->initial = u0;
  }
  IntegrationResult res;
  try {
    res = integrate(cloud, setup, icfg, u0, observer);
  } catch (const NonFiniteState& e) {
    rec.stable = false;
    rec.failure = e.what();
    rec.error_rel_l2 = std::numeric_limits<double>::quiet_NaN();
    rec.mass_ratio = std::numeric_limits<double>::quiet_NaN();
    return rec;
  }
  const auto exact = exact_solution(ic, cloud, setup.advection.velocity, spec.t_end);
  rec.dt = res.dt;
  rec.steps = res.steps;
  rec.error_rel_l2 = error_rel_l2(res.u, exact).value;
  rec.wall_time = res.run_seconds;
  rec.setup_time = res.setup_seconds;
  rec.mass_ratio = m0 != 0.0 ? total_mass(res.u, cloud) / m0 : 1.0;
  rec.mood_events = res.mood_events;
  if (!(rec.error_rel_l2 <= spec.unstable_error)) {
    rec.stable = false;
    rec.failure = "error above instability limit";
  }
  if (out) {
    out->final_state = std::move(res.u);
    out->exact = exact;
    out->history = std::move(res.history);
  }
  return rec;
}

ConvergenceResult run_convergence(const ConvergenceConfig& cfg) {
  ConvergenceResult result;
  InitialCondition::by_id(cfg.init);  // validates the id before any run
  for (const auto& combo : cfg.combos) {
    std::vector<double> ns, errs;
    bool complete = true;
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      double sum = 0.0;
      std::size_t ok = 0;
      for (std::size_t k = 0; k < cfg.seeds; ++k) {
        CaseSpec spec = case_spec(cfg.init, cfg.n_values[ni], cfg.randomness,
                      run_seed(derive_seed(cfg.master_seed, ni), k), cfg.t_end, cfg.params);
        auto rec = run_case(spec, combo);
        if (rec.stable) {
          sum += rec.error_rel_l2;
          ++ok;
        } else {
          complete = false;
        }
        result.records.push_back(std::move(rec));
      }
      if (ok > 0) {
        ns.push_back(static_cast<double>(cfg.n_values[ni]));
        errs.push_back(sum / static_cast<double>(ok));
      }
    }
    OrderFit fit;
    fit.label = combo.label();
    fit.complete = complete;
    if (ns.size() >= 2) {
      fit.order = convergence_order(ns, errs, 3);
      fit.finest_pair_order = convergence_order(ns, errs, 2);
    } else {
      fit.order = fit.finest_pair_order = std::numeric_limits<double>::quiet_NaN();
    }
    result.orders.push_back(fit);
  }
  return result;
}

std::vector<DirichletProfile> run_dirichlet(const DirichletConfig& cfg) {
  std::vector<DirichletProfile> out;
  for (const auto& combo0 : cfg.combos) {
    Combo combo = combo0;
    combo.cfl = cfg.cfl;
    CaseSpec spec = case_spec("dirichlet_shock", cfg.n, cfg.randomness, cfg.seed, cfg.t_end, cfg.params);
    RunOutputs ro;
    DirichletProfile p;
    p.record = run_case(spec, combo, &ro);
    for (const auto& x : ro.positions) p.x.push_back(x[0]);
    p.u = ro.final_state;
    p.exact = ro.exact;
    if (!p.u.empty()) {
      const auto [lo, hi] = std::minmax_element(p.u.begin(), p.u.end());
      p.overshoot = *hi - 1.0;
      p.undershoot = *lo;
      const auto left = std::min_element(p.x.begin(), p.x.end()) - p.x.begin();
      p.boundary_value = p.u[static_cast<std::size_t>(left)];
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<MassSeries> run_conservation(const ConservationConfig& cfg) {
  std::vector<MassSeries> out;
  const std::size_t every = std::max<std::size_t>(cfg.sample_every, 1);
  for (const auto& combo0 : cfg.combos) {
    Combo combo = combo0;
    combo.cfl = cfg.cfl;
    CaseSpec spec = case_spec("gauss1d", cfg.n, cfg.randomness, cfg.seed, cfg.t_end, cfg.params);
    RunOutputs ro;
    MassSeries s;
    s.record = run_case(spec, combo, &ro);
    if (!ro.history.empty()) {
      const double m0 = ro.history.front().mass;
      for (std::size_t k = 0; k < ro.history.size(); ++k) {
        if (k % every != 0 && k + 1 != ro.history.size()) continue;
        s.t.push_back(ro.history[k].t);
        s.mass_ratio.push_back(ro.history[k].mass / m0);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

EfficiencyResult run_efficiency(const EfficiencyConfig& cfg) {
  EfficiencyResult result;
  for (const auto& combo : cfg.combos) {
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      EfficiencyRow row;
      row.label = combo.label();
      row.n = cfg.n_values[ni];
      for (std::size_t k = 0; k < cfg.seeds; ++k) {
        CaseSpec spec = case_spec(cfg.init, cfg.n_values[ni], cfg.randomness,
                      run_seed(derive_seed(cfg.master_seed, ni), k), cfg.t_end, cfg.params);
        auto rec = run_case(spec, combo);
        ++row.runs;
        if (rec.stable) {
          row.mean_error += rec.error_rel_l2;
          row.mean_wall_time += rec.wall_time;
          row.mean_setup_time += rec.setup_time;
        } else {
          ++row.unstable;
        }
        result.records.push_back(std::move(rec));
      }
      const std::size_t ok = row.runs - row.unstable;
      if (ok > 0) {
        row.mean_error /= static_cast<double>(ok);
        row.mean_wall_time /= static_cast<double>(ok);
        row.mean_setup_time /= static_cast<double>(ok);
      } else {
        row.mean_error = row.mean_wall_time = row.mean_setup_time =
            std::numeric_limits<double>::quiet_NaN();
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

LongRunResult run_long_time_stability(const LongRunConfig& cfg) {
  LongRunResult result;
  std::vector<LongRunRow> rows(cfg.combos.size());
  for (std::size_t c = 0; c < cfg.combos.size(); ++c) rows[c].label = cfg.combos[c].label();
  const double window_start = (1.0 - cfg.late_window) * cfg.t_end;
  for (std::size_t g = 0; g < cfg.grids; ++g) {
    CaseSpec spec =
        case_spec(cfg.init, cfg.n, cfg.randomness, run_seed(cfg.master_seed, g), cfg.t_end, cfg.params);
    spec.blowup_bound = cfg.blowup_bound;
    // Judged by boundedness alone; the error of a dissipated box is large.
    spec.unstable_error = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cfg.combos.size(); ++c) {
      Combo combo = cfg.combos[c];
      combo.cfl = cfg.cfl;
      double initial_max = 0.0;
      double late_max = 0.0;
      const StepObserver watch = [&](const StepDiagnostics& d, std::span<const double>,
                                     const MoodReport*) {
        if (d.t > window_start) late_max = std::max({late_max, std::abs(d.min), std::abs(d.max)});
      };
      RunOutputs out;
      auto rec = run_case(spec, combo, &out, watch);
      for (double v : out.initial) initial_max = std::max(initial_max, std::abs(v));
      ++rows[c].grids;
      if (rec.failure.empty()) ++rows[c].finite;
      if (rec.stable && late_max > initial_max) {
        rec.stable = false;
        rec.failure = "growth above the initial maximum";
      }
      if (rec.stable) ++rows[c].stable;
      result.records.push_back(std::move(rec));
    }
  }
  for (auto& r : rows) {
    r.stable_fraction =
        r.grids ? static_cast<double>(r.stable) / static_cast<double>(r.grids) : 0.0;
  }
  result.rows = std::move(rows);
  return result;
}

void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records) {
  csv::Writer w(os, {"label", "scheme", "tableau", "mood", "dim", "N", "points", "r", "seed",
                     "cfl", "t_end", "dt", "steps", "error_rel_l2", "wall_time", "setup_time",
                     "mass_ratio", "mood_events", "stable", "failure"});
  for (const auto& r : records) {
    w.row(r.label, r.scheme, r.tableau, r.mood, r.dim, r.n, r.points, r.randomness, r.seed,
          r.cfl, r.t_end, r.dt, r.steps, r.error_rel_l2, r.wall_time, r.setup_time,
          r.mass_ratio, r.mood_events, r.stable, r.failure);
  }
}

void write_orders_csv(std::ostream& os, std::span<const OrderFit> orders) {
  csv::Writer w(os, {"label", "order", "finest_pair_order", "complete"});
  for (const auto& o : orders) w.row(o.label, o.order, o.finest_pair_order, o.complete);
}

void write_profiles_csv(std::ostream& os, std::span<const DirichletProfile> profiles) {
  csv::Writer w(os, {"label", "x", "u", "exact"});
  for (const auto& p : profiles) {
    for (std::size_t i = 0; i < p.u.size(); ++i) w.row(p.record.label, p.x[i], p.u[i], p.exact[i]);
  }
}

void write_mass_csv(std::ostream& os, std::span<const MassSeries> series) {
  csv::Writer w(os, {"label", "t", "mass_ratio"});
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.t.size(); ++k) w.row(s.record.label, s.t[k], s.mass_ratio[k]);
  }
}

void write_efficiency_csv(std::ostream& os, std::span<const EfficiencyRow> rows) {
  csv::Writer w(os, {"label", "N", "runs", "unstable", "mean_error", "mean_wall_time",
                     "mean_setup_time"});
  for (const auto& r : rows) {
    w.row(r.label, r.n, r.runs, r.unstable, r.mean_error, r.mean_wall_time, r.mean_setup_time);
  }
}

void write_long_run_csv(std::ostream& os, std::span<const LongRunRow> rows) {
  csv::Writer w(os, {"label", "grids", "finite", "stable", "stable_fraction"});
  for (const auto& r : rows) w.row(r.label, r.grids, r.finite, r.stable, r.stable_fraction);
}

}  // namespace meshless
