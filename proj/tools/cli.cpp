#include "cli.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "meshless/csv.hpp"
#include "meshless/errors.hpp"
#include "meshless/experiments.hpp"
#include "meshless/stability.hpp"
#include "meshless/timeint.hpp"

namespace meshless::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::size_t to_count(const std::string& s, const std::string& what) {
  try {
    const long long v = csv::parse_int(s);
    if (v < 0) throw Error("negative");
    return static_cast<std::size_t>(v);
  } catch (const Error&) {
    throw UsageError("invalid value '" + s + "' for " + what, 2);
  }
}

double to_real(const std::string& s, const std::string& what) {
  try {
    return csv::parse_double(s);
  } catch (const Error&) {
    throw UsageError("invalid value '" + s + "' for " + what, 2);
  }
}

std::uint64_t to_seed(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("invalid value '" + s + "' for " + what, 2);
  }
  return v;
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw UsageError("invalid value '" + s + "' for " + what, 2);
}

/// Raw textual settings keyed by `section.key`; later layers overwrite.
using Settings = std::map<std::string, std::string>;

// Flag name, config key, help text.
struct Field {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"--dim", "run.dim", "spatial dimension (1 or 2)"},
      {"--init", "run.init", "initial condition: gauss1d, step1d, gauss2d, box2d, dirichlet_shock"},
      {"--schemes", "scheme.schemes",
       "scheme combinations scheme[+integrator][+mood][@cfl], comma separated"},
      {"--tableau", "run.tableau", "time integrator: euler, ralston2, ssprk3, rk4"},
      {"--mood", "run.mood", "enable MOOD limiting for single runs (0/1)"},
      {"--cfl", "run.cfl", "time step as a fraction of the forward-Euler bound"},
      {"--t-end", "run.t_end", "final time"},
      {"--n", "grid.n", "points per axis"},
      {"--n-values", "grid.n_values", "points per axis for studies, comma separated"},
      {"--randomness", "grid.randomness",
       "grid perturbation as a fraction of the lattice spacing (<= 0.5), comma separated"},
      {"--seeds", "grid.seeds", "random grids per size (convergence, efficiency)"},
      {"--grids", "grid.grids", "random grids per cell (sensitivity, longrun)"},
      {"--seed", "run.seed", "master seed (env MESHLESS_SEED)"},
      {"--velocity", "model.velocity", "advection velocity a_x[,a_y] (default 1 / 1,1)"},
      {"--alpha", "model.alpha", "weight decay alpha (default dx^-2 in 1D, 6/h_max^2 in 2D)"},
      {"--hmax-factor", "model.hmax_factor",
       "neighbour radius in lattice spacings (default 3.5 in 1D, sqrt(34) in 2D)"},
      {"--weno-eps", "model.weno_eps", "WENO regulariser (default 1e-6 in 1D, 1e-12 in 2D)"},
      {"--out", "output.dir", "output directory"},
      {"--jobs", "run.jobs", "worker count (runs execute sequentially; must be 1)"},
  };
  return f;
}

Settings read_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("cannot read config: ") + e.what(), 2);
  }
  std::set<std::string> known;
  for (const auto& f : fields()) known.insert(f.key);
  Settings out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw UsageError("config " + path + ": key '" + section + "' outside a section", 2);
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known.contains(full)) {
        throw UsageError("config " + path + ": unknown key '" + full + "'", 2);
      }
      out[full] = value.get_value<std::string>();
    }
  }
  return out;
}

struct CommandDefaults {
  int dim;
  std::string init;
  std::vector<std::string> schemes;
  std::size_t n;
  std::vector<std::size_t> n_values;
  std::vector<double> randomness;
  double cfl;
  double t_end;
  std::size_t seeds;
  std::size_t grids;
};

CommandDefaults defaults_for(const std::string& cmd, int dim) {
  const bool two = dim == 2;
  CommandDefaults d{dim, two ? "gauss2d" : "gauss1d", {}, two ? 50u : 100u, {}, {0.5},
                    0.05,  two ? 1.0 : 2.5,          1,  100};
  if (cmd == "run") {
    d.schemes = {"muscl2"};
  } else if (cmd == "convergence") {
    if (two) {
      d.schemes = {"positive2d+euler", "upwind2", "weno2", "muscl1+mood", "muscl2+mood", "muscl2"};
      d.n_values = {30, 50, 70, 100};
      d.cfl = 1.0 / 40.0;
    } else {
      d.schemes = {"upwind1", "upwind2", "weno2", "muscl2+mood", "muscl4+mood"};
      d.n_values = {100, 200, 400, 800, 1600};
      d.cfl = 1.0 / 20.0;
    }
  } else if (cmd == "spectrum") {
    d.schemes = two ? std::vector<std::string>{"positive2d", "upwind2", "muscl1", "muscl2"}
                    : std::vector<std::string>{"upwind1", "upwind2", "central", "muscl1",
                                               "muscl2", "muscl3", "muscl4"};
    d.n = two ? 70 : 100;
    d.cfl = two ? 0.5 : 0.125;
  } else if (cmd == "sensitivity") {
    d.schemes = {"upwind1", "upwind2", "muscl1", "muscl2", "muscl3", "muscl4"};
    d.n_values = two ? std::vector<std::size_t>{30, 50} : std::vector<std::size_t>{100, 200, 400};
    d.randomness = {0.5, 0.45};
  } else if (cmd == "dirichlet") {
    d.init = "dirichlet_shock";
    d.schemes = {"upwind1", "upwind2", "weno2", "muscl2+mood", "muscl4+mood"};
    d.cfl = 1.0 / 3.0;
    d.t_end = 5.0;
  } else if (cmd == "conservation") {
    d.schemes = {"upwind1", "weno2", "muscl2", "muscl2+mood", "muscl4+mood"};
    d.cfl = 0.25;
    d.t_end = 200.0;
  } else if (cmd == "efficiency") {
    for (const auto& c : two ? efficiency_combos_2d() : efficiency_combos_1d()) {
      std::ostringstream os;
      os << c.label() << '@' << csv::format(c.cfl);
      d.schemes.push_back(os.str());
    }
    d.n_values = two ? std::vector<std::size_t>{30, 46, 72, 111}
                     : std::vector<std::size_t>{30, 46, 72, 111, 171, 264, 407, 629, 971, 1500};
    d.t_end = two ? 1.0 : 7.5;
    d.seeds = 10;
  } else if (cmd == "longrun") {
    d.init = "box2d";
    d.schemes = {"muscl1", "muscl2", "positive2d+euler", "upwind2", "weno2"};
    d.n = 20;
    d.cfl = 0.1;
    d.t_end = 30.0 * std::numbers::sqrt2;
    d.grids = 50;
  }
  return d;
}

void apply_settings(RunSpec& spec, const Settings& s) {
  auto get = [&](const char* key) -> const std::string* {
    auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };
  if (auto v = get("run.init")) spec.init = *v;
  if (auto v = get("scheme.schemes")) spec.schemes = split_list(*v);
  if (auto v = get("run.tableau")) spec.tableau = *v;
  if (auto v = get("run.mood")) spec.mood = to_bool(*v, "mood");
  if (auto v = get("run.cfl")) spec.cfl = to_real(*v, "cfl");
  if (auto v = get("run.t_end")) spec.t_end = to_real(*v, "t-end");
  if (auto v = get("grid.n")) spec.n = to_count(*v, "n");
  if (auto v = get("grid.n_values")) {
    spec.n_values.clear();
    for (const auto& x : split_list(*v)) spec.n_values.push_back(to_count(x, "n-values"));
  }
  if (auto v = get("grid.randomness")) {
    spec.randomness.clear();
    for (const auto& x : split_list(*v)) spec.randomness.push_back(to_real(x, "randomness"));
  }
  if (auto v = get("grid.seeds")) spec.seeds = to_count(*v, "seeds");
  if (auto v = get("grid.grids")) spec.grids = to_count(*v, "grids");
  if (auto v = get("run.seed")) spec.seed = to_seed(*v, "seed");
  if (auto v = get("model.velocity")) {
    const auto parts = split_list(*v);
    if (parts.empty() || parts.size() > 2) throw UsageError("velocity needs 1 or 2 values", 2);
    Vec2 a{to_real(parts[0], "velocity"), 0.0};
    if (parts.size() == 2) a[1] = to_real(parts[1], "velocity");
    spec.params.velocity = a;
  }
  if (auto v = get("model.alpha")) spec.params.alpha = to_real(*v, "alpha");
  if (auto v = get("model.hmax_factor")) spec.params.radius_factor = to_real(*v, "hmax-factor");
  if (auto v = get("model.weno_eps")) spec.params.weno_epsilon = to_real(*v, "weno-eps");
  if (auto v = get("output.dir")) spec.out_dir = *v;
  if (auto v = get("run.jobs")) spec.jobs = to_count(*v, "jobs");
}

void validate(const RunSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) throw UsageError("dim must be 1 or 2", 2);
  if (spec.schemes.empty()) throw UsageError("no schemes given", 2);
  if (!(spec.cfl > 0.0)) throw UsageError("cfl must be positive", 2);
  if (!(spec.t_end >= 0.0)) throw UsageError("t-end must be non-negative", 2);
  if (spec.jobs != 1) throw UsageError("only --jobs 1 is supported", 2);
  if (spec.seeds == 0 || spec.grids == 0) throw UsageError("seeds and grids must be positive", 2);
  for (double r : spec.randomness) {
    if (!(r >= 0.0 && r <= 0.5)) throw UsageError("randomness must lie in [0, 0.5]", 2);
  }
  try {
    const auto ic = InitialCondition::by_id(spec.init);
    if (ic.dim != spec.dim) throw UsageError("initial condition does not match --dim", 2);
    ButcherTableau::by_name(spec.tableau);
    std::set<std::string> ids;
    for (const auto& id : scheme_ids()) ids.insert(id);
    for (const auto& s : spec.schemes) {
      const Combo c = Combo::parse(s, spec.cfl, spec.tableau);
      if (!ids.contains(c.scheme)) throw UsageError("unknown scheme '" + c.scheme + "'", 2);
    }
  } catch (const Error& e) {
    throw UsageError(e.what(), 2);
  }
}

}  // namespace

std::vector<std::string> commands() {
  return {"run", "convergence", "spectrum", "sensitivity", "dirichlet", "conservation",
          "efficiency", "longrun"};
}

RunSpec parse_args(int argc, const char* const* argv, std::optional<std::string> env_seed) {
  CLI::App app{"Meshless advection schemes on irregular point clouds"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> flag_values;
  std::string config;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name, "");
    subs[name] = sub;
    sub->add_option("--config", config, "INI file with [run] [grid] [scheme] [model] [output]");
    for (const auto& f : fields()) {
      sub->add_option(f.flag, flag_values[std::string(f.key) + "@" + name], f.help);
    }
  }
  subs["run"]->description("single simulation");
  subs["convergence"]->description("error versus grid size");
  subs["spectrum"]->description("eigenvalues of the semi-discrete operators on one grid");
  subs["sensitivity"]->description("fraction of random grids with unstable spectra");
  subs["dirichlet"]->description("shock with a Dirichlet inflow boundary");
  subs["conservation"]->description("mass over a long run");
  subs["efficiency"]->description("error versus wall time");
  subs["longrun"]->description("long 2D runs as a nonlinear stability check");
  app.footer(
      "Defaults: a = 1 (1D) or (1,1) (2D), h_max = 3.5 dx (1D) or sqrt(34) dx (2D),\n"
      "alpha = dx^-2 (1D) or 6/h_max^2 (2D), WENO eps = 1e-6 (1D) or 1e-12 (2D).");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::CallForVersion& e) {
    throw UsageError(kVersion, 0);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    os << e.what() << "\n" << app.help();
    throw UsageError(os.str(), 2);
  }

  const CLI::App* chosen = app.get_subcommands().front();
  RunSpec spec;
  spec.command = chosen->get_name();
  spec.config_file = config;

  Settings file = config.empty() ? Settings{} : read_config(config);
  Settings flags;
  for (const auto& f : fields()) {
    const auto* opt = chosen->get_option(f.flag);
    if (opt->count() > 0) flags[f.key] = flag_values[std::string(f.key) + "@" + spec.command];
  }
  // The dimension selects the defaults, so resolve it first.
  spec.dim = 1;
  for (const Settings* layer : {&file, &flags}) {
    if (auto it = layer->find("run.dim"); it != layer->end()) {
      spec.dim = static_cast<int>(to_count(it->second, "dim"));
    }
  }
  if (spec.command == "longrun" && !file.contains("run.dim") && !flags.contains("run.dim")) {
    spec.dim = 2;
  }
  if (spec.dim != 1 && spec.dim != 2) throw UsageError("dim must be 1 or 2", 2);
  const CommandDefaults d = defaults_for(spec.command, spec.dim);
  spec.init = d.init;
  spec.schemes = d.schemes;
  spec.n = d.n;
  spec.n_values = d.n_values;
  spec.randomness = d.randomness;
  spec.cfl = d.cfl;
  spec.t_end = d.t_end;
  spec.seeds = d.seeds;
  spec.grids = d.grids;

  apply_settings(spec, file);
  if (env_seed && !env_seed->empty()) spec.seed = to_seed(*env_seed, "MESHLESS_SEED");
  apply_settings(spec, flags);
  validate(spec);
  return spec;
}

std::string describe(const RunSpec& spec) {
  std::ostringstream os;
  auto join = [](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s << ',';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>) {
        s << csv::format(v[i]);
      } else {
        s << v[i];
      }
    }
    return s.str();
  };
  os << "command=" << spec.command << '\n'
     << "dim=" << spec.dim << '\n'
     << "init=" << spec.init << '\n'
     << "schemes=" << join(spec.schemes) << '\n'
     << "n=" << spec.n << '\n'
     << "n_values=" << join(spec.n_values) << '\n'
     << "randomness=" << join(spec.randomness) << '\n'
     << "cfl=" << csv::format(spec.cfl) << '\n'
     << "t_end=" << csv::format(spec.t_end) << '\n'
     << "tableau=" << spec.tableau << '\n'
     << "mood=" << (spec.mood ? 1 : 0) << '\n'
     << "seeds=" << spec.seeds << '\n'
     << "grids=" << spec.grids << '\n'
     << "seed=" << spec.seed << '\n';
  if (spec.params.velocity) {
    os << "velocity=" << csv::format((*spec.params.velocity)[0]) << ','
       << csv::format((*spec.params.velocity)[1]) << '\n';
  }
  if (spec.params.alpha) os << "alpha=" << csv::format(*spec.params.alpha) << '\n';
  if (spec.params.radius_factor) {
    os << "hmax_factor=" << csv::format(*spec.params.radius_factor) << '\n';
  }
  if (spec.params.weno_epsilon) os << "weno_eps=" << csv::format(*spec.params.weno_epsilon) << '\n';
  if (!spec.config_file.empty()) os << "config=" << spec.config_file << '\n';
  return os.str();
}

namespace {

std::vector<Combo> combos(const RunSpec& spec) {
  std::vector<Combo> out;
  for (const auto& s : spec.schemes) out.push_back(Combo::parse(s, spec.cfl, spec.tableau));
  return out;
}

template <typename Fn>
std::string table(Fn&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

std::string plot_lines(const std::string& csv_file, const std::vector<std::string>& labels,
                       const std::string& xcol, const std::string& ycol) {
  std::ostringstream os;
  os << "plot ";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'" << csv_file << "' using (strcol(1) eq '" << labels[i] << "' ? column('" << xcol
       << "') : 1/0):(column('" << ycol << "')) with linespoints title '" << labels[i] << "'";
  }
  os << '\n';
  return os.str();
}

const char* kPlotHeader = "set datafile separator ','\nset key autotitle columnhead\n";

std::vector<Artifact> cmd_run(const RunSpec& spec, std::ostream& log) {
  Combo combo = combos(spec).front();
  if (spec.mood) combo.mood = true;
  CaseSpec cs;
  cs.init = spec.init;
  cs.n = spec.n;
  cs.randomness = spec.randomness.front();
  cs.seed = spec.seed;
  cs.t_end = spec.t_end;
  cs.params = spec.params;
  RunOutputs out;
  const auto rec = run_case(cs, combo, &out);
  log << combo.label() << ": error " << rec.error_rel_l2 << ", " << rec.steps << " steps"
      << (rec.stable ? "" : " (unstable: " + rec.failure + ")") << '\n';
  std::vector<Artifact> a;
  a.push_back({"run.csv", table([&](std::ostream& os) { write_records_csv(os, {&rec, 1}); })});
  a.push_back({"diagnostics.csv",
               table([&](std::ostream& os) { write_diagnostics_csv(os, out.history); })});
  a.push_back({"state.csv", table([&](std::ostream& os) {
                 csv::Writer w(os, {"index", "x", "y", "u0", "u", "exact"});
                 for (std::size_t i = 0; i < out.final_state.size(); ++i) {
                   w.row(i, out.positions[i][0], out.positions[i][1], out.initial[i],
                         out.final_state[i], out.exact[i]);
                 }
               })});
  std::string plt = kPlotHeader;
  plt += spec.dim == 1 ? "set xlabel 'x'\nplot 'state.csv' using 2:5 with points title 'u', "
                         "'state.csv' using 2:6 with lines title 'exact'\n"
                       : "set view map\nsplot 'state.csv' using 2:3:5 with points palette "
                         "title 'u'\n";
  a.push_back({"run.plt", plt});
  return a;
}

std::vector<Artifact> cmd_convergence(const RunSpec& spec, std::ostream& log) {
  ConvergenceConfig cfg;
  cfg.init = spec.init;
  cfg.combos = combos(spec);
  cfg.n_values = spec.n_values;
  cfg.randomness = spec.randomness.front();
  cfg.t_end = spec.t_end;
  cfg.seeds = spec.seeds;
  cfg.master_seed = spec.seed;
  cfg.params = spec.params;
  const auto res = run_convergence(cfg);
  std::vector<std::string> labels;
  for (const auto& o : res.orders) {
    log << o.label << ": order " << o.order << '\n';
    labels.push_back(o.label);
  }
  std::string plt = kPlotHeader;
  plt += "set logscale xy\nset xlabel 'N'\nset ylabel 'relative L2 error'\n";
  plt += plot_lines("convergence.csv", labels, "N", "error_rel_l2");
  return {{"convergence.csv", table([&](std::ostream& os) { write_records_csv(os, res.records); })},
          {"orders.csv", table([&](std::ostream& os) { write_orders_csv(os, res.orders); })},
          {"convergence.plt", plt}};
}

std::vector<Artifact> cmd_spectrum(const RunSpec& spec, std::ostream& log) {
  const Domain domain = Domain::periodic_box(spec.dim, -5.0, 5.0);
  const double dx = lattice_spacing(domain, spec.n);
  const PointCloud cloud =
      generate_grid(domain, GridGenConfig{spec.n, spec.randomness.front() * dx, spec.seed},
                    spec.params.neighbor_radius(spec.dim, dx));
  const SchemeSetup setup = spec.params.setup(cloud);
  const double dt = spec.cfl * euler_timestep(cloud, setup);
  std::vector<SpectrumReport> spectra;
  std::vector<std::string> labels;
  for (const auto& c : combos(spec)) {
    auto scheme = make_scheme(c.scheme, cloud, setup);
    SpectrumReport rep = compute_spectrum(assemble(*scheme));
    rep.scheme = c.scheme;
    rep.seed = spec.seed;
    rep.dt = dt;
    log << c.scheme << ": max real part " << rep.max_real << (rep.unstable ? " (unstable)" : "")
        << '\n';
    labels.push_back(c.scheme);
    spectra.push_back(std::move(rep));
  }
  std::vector<ButcherTableau> tabs{ButcherTableau::forward_euler(), ButcherTableau::ralston2(),
                                   ButcherTableau::ssprk3(), ButcherTableau::rk4()};
  std::ostringstream plt;
  plt << kPlotHeader << "set xlabel 'Re(dt lambda)'\nset ylabel 'Im(dt lambda)'\nplot ";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    plt << "'spectrum.csv' using (strcol(1) eq '" << labels[i]
        << "' ? column('re')*column('dt') : 1/0):(column('im')*column('dt')) with points title '"
        << labels[i] << "', \\\n     ";
  }
  plt << "'rk_boundary.csv' using 2:3 with dots title 'RK stability regions'\n";
  return {{"spectrum.csv", table([&](std::ostream& os) { write_spectrum_csv(os, spectra); })},
          {"rk_boundary.csv", table([&](std::ostream& os) { write_rk_boundary_csv(os, tabs); })},
          {"spectrum.plt", plt.str()}};
}

std::vector<Artifact> cmd_sensitivity(const RunSpec& spec, std::ostream& log) {
  SensitivityConfig cfg;
  cfg.dim = spec.dim;
  cfg.schemes.clear();
  for (const auto& c : combos(spec)) cfg.schemes.push_back(c.scheme);
  cfg.n_grids = spec.grids;
  cfg.n_values = spec.n_values;
  cfg.randomness = spec.randomness;
  cfg.master_seed = spec.seed;
  cfg.params = spec.params;
  const auto rows = sensitivity_study(cfg);
  for (const auto& r : rows) {
    log << r.scheme << " N=" << r.n << " r=" << r.randomness << "dx: " << r.pct_unstable
        << "% unstable\n";
  }
  return {{"sensitivity.csv", table([&](std::ostream& os) { write_sensitivity_csv(os, rows); })}};
}

std::vector<Artifact> cmd_dirichlet(const RunSpec& spec, std::ostream& log) {
  DirichletConfig cfg;
  cfg.n = spec.n;
  cfg.randomness = spec.randomness.front();
  cfg.cfl = spec.cfl;
  cfg.t_end = spec.t_end;
  cfg.combos = combos(spec);
  cfg.seed = spec.seed;
  cfg.params = spec.params;
  const auto profiles = run_dirichlet(cfg);
  std::vector<ExperimentRecord> recs;
  std::vector<std::string> labels;
  for (const auto& p : profiles) {
    log << p.record.label << ": overshoot " << p.overshoot << ", min " << p.undershoot << '\n';
    recs.push_back(p.record);
    labels.push_back(p.record.label);
  }
  std::string plt = kPlotHeader;
  plt += "set xlabel 'x'\nset ylabel 'u'\n";
  plt += plot_lines("profiles.csv", labels, "x", "u");
  return {{"dirichlet.csv", table([&](std::ostream& os) { write_records_csv(os, recs); })},
          {"profiles.csv", table([&](std::ostream& os) { write_profiles_csv(os, profiles); })},
          {"dirichlet.plt", plt}};
}

std::vector<Artifact> cmd_conservation(const RunSpec& spec, std::ostream& log) {
  ConservationConfig cfg;
  cfg.n = spec.n;
  cfg.randomness = spec.randomness.front();
  cfg.cfl = spec.cfl;
  cfg.t_end = spec.t_end;
  cfg.combos = combos(spec);
  cfg.seed = spec.seed;
  cfg.params = spec.params;
  const auto series = run_conservation(cfg);
  std::vector<ExperimentRecord> recs;
  std::vector<std::string> labels;
  for (const auto& s : series) {
    log << s.record.label << ": final mass ratio " << s.record.mass_ratio << '\n';
    recs.push_back(s.record);
    labels.push_back(s.record.label);
  }
  std::string plt = kPlotHeader;
  plt += "set xlabel 't'\nset ylabel 'm(t)/m(0)'\n";
  plt += plot_lines("mass.csv", labels, "t", "mass_ratio");
  return {{"conservation.csv", table([&](std::ostream& os) { write_records_csv(os, recs); })},
          {"mass.csv", table([&](std::ostream& os) { write_mass_csv(os, series); })},
          {"mass.plt", plt}};
}

std::vector<Artifact> cmd_efficiency(const RunSpec& spec, std::ostream& log) {
  EfficiencyConfig cfg;
  cfg.dim = spec.dim;
  cfg.init = spec.init;
  cfg.combos = combos(spec);
  cfg.n_values = spec.n_values;
  cfg.randomness = spec.randomness.front();
  cfg.t_end = spec.t_end;
  cfg.seeds = spec.seeds;
  cfg.master_seed = spec.seed;
  cfg.params = spec.params;
  const auto res = run_efficiency(cfg);
  std::vector<std::string> labels;
  for (const auto& c : cfg.combos) labels.push_back(c.label());
  for (const auto& r : res.rows) {
    log << r.label << " N=" << r.n << ": error " << r.mean_error << ", time "
        << r.mean_wall_time << "s, unstable " << r.unstable << '/' << r.runs << '\n';
  }
  std::string plt = kPlotHeader;
  plt += "set logscale xy\nset xlabel 'wall time [s]'\nset ylabel 'relative L2 error'\n";
  plt += plot_lines("efficiency.csv", labels, "mean_wall_time", "mean_error");
  return {{"efficiency.csv", table([&](std::ostream& os) { write_efficiency_csv(os, res.rows); })},
          {"efficiency_runs.csv",
           table([&](std::ostream& os) { write_records_csv(os, res.records); })},
          {"efficiency.plt", plt}};
}

std::vector<Artifact> cmd_longrun(const RunSpec& spec, std::ostream& log) {
  LongRunConfig cfg;
  cfg.init = spec.init;
  cfg.n = spec.n;
  cfg.randomness = spec.randomness.front();
  cfg.cfl = spec.cfl;
  cfg.t_end = spec.t_end;
  cfg.grids = spec.grids;
  cfg.combos = combos(spec);
  cfg.master_seed = spec.seed;
  cfg.params = spec.params;
  const auto res = run_long_time_stability(cfg);
  for (const auto& r : res.rows) {
    log << r.label << ": finite on " << r.finite << ", stable on " << r.stable << '/' << r.grids
        << " grids\n";
  }
  return {{"longrun.csv", table([&](std::ostream& os) { write_long_run_csv(os, res.rows); })},
          {"longrun_runs.csv",
           table([&](std::ostream& os) { write_records_csv(os, res.records); })}};
}

}  // namespace

std::vector<Artifact> run_command(const RunSpec& spec, std::ostream& log) {
  const std::string& c = spec.command;
  if (c == "run") return cmd_run(spec, log);
  if (c == "convergence") return cmd_convergence(spec, log);
  if (c == "spectrum") return cmd_spectrum(spec, log);
  if (c == "sensitivity") return cmd_sensitivity(spec, log);
  if (c == "dirichlet") return cmd_dirichlet(spec, log);
  if (c == "conservation") return cmd_conservation(spec, log);
  if (c == "efficiency") return cmd_efficiency(spec, log);
  if (c == "longrun") return cmd_longrun(spec, log);
  throw InvalidArgument("unknown command '" + c + "'");
}

void emit_outputs(const std::vector<Artifact>& artifacts, const RunSpec& spec) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) throw Error("cannot create " + spec.out_dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = spec.out_dir / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw Error("cannot write " + path.string());
  };
  std::string files;
  for (const auto& a : artifacts) {
    write(a.filename, a.content);
    files += a.filename + ' ';
  }
  std::ostringstream manifest;
  manifest << "version=" << kVersion << '\n' << describe(spec) << "artifacts=" << files << '\n';
  write("manifest.txt", manifest.str());
}

}  // namespace meshless::cli
