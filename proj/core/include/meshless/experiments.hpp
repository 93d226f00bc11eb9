#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshless/pointcloud.hpp"
#include "meshless/schemes.hpp"
#include "meshless/timeint.hpp"

namespace meshless {

/// Closed-form initial profile on [-5,5]^dim. `dirichlet` profiles live on a
/// bounded interval with a prescribed inflow value at the left end.
struct InitialCondition {
  std::string id;
  int dim = 1;
  std::function<double(const Vec2&)> profile;
  std::optional<double> inflow;

  /// gauss1d, step1d, gauss2d, box2d, dirichlet_shock.
  static InitialCondition by_id(std::string_view id);
  bool bounded() const { return inflow.has_value(); }
  Domain domain() const;
};

std::vector<std::string> initial_condition_ids();

/// Initial values at the cloud points (inflow node set to the inflow value).
std::vector<double> sample(const InitialCondition& ic, const PointCloud& cloud);

/// Exact solution u0(x - a t): periodic wrap on periodic axes, inflow value
/// where the characteristic leaves a bounded domain through its left end.
std::vector<double> exact_solution(const InitialCondition& ic, const PointCloud& cloud,
                                   const Vec2& velocity, double t);

struct ErrorNorm {
  double value = 0.0;
  /// True when the exact field is zero and the absolute norm was returned.
  bool absolute = false;
};
ErrorNorm error_rel_l2(std::span<const double> u, std::span<const double> exact);

/// First-order quadrature sum of the cloud's weights times u.
double total_mass(std::span<const double> u, const PointCloud& cloud);

/// Order p of err ~ C n^-p from a least-squares line through the last
/// `finest` points of (log n, log err).
double convergence_order(std::span<const double> n, std::span<const double> err,
                         std::size_t finest = 3);

/// Space/time/limiter combination with its CFL number.
struct Combo {
  std::string scheme;
  std::string tableau = "ssprk3";
  bool mood = false;
  double cfl = 0.05;

  std::string label() const;
  /// Parses `scheme[+tableau][+mood][@cfl]`, e.g. `muscl4+rk4+mood@0.7`.
  static Combo parse(std::string_view text, double default_cfl,
                     std::string_view default_tableau = "ssprk3");
};

/// The order-matched combinations timed in the 1D efficiency study.
std::vector<Combo> efficiency_combos_1d();
/// 2D efficiency study: third-order RK for all but the first-order scheme, CFL 0.5.
std::vector<Combo> efficiency_combos_2d();

struct CaseSpec {
  std::string init = "gauss1d";
  std::size_t n = 100;           // points per axis
  double randomness = 0.5;       // fraction of the lattice spacing
  std::uint64_t seed = 0;
  double t_end = 1.0;
  /// Runs with error above this (or non-finite states) are unstable.
  double unstable_error = 10.0;
  /// Abort a run once max |u| exceeds this.
  double blowup_bound = 1e6;
  ModelParams params;
};

struct ExperimentRecord {
  std::string label;
  std::string scheme;
  std::string tableau;
  bool mood = false;
  int dim = 1;
  std::size_t n = 0;
  std::size_t points = 0;
  double randomness = 0.0;
  std::uint64_t seed = 0;
  double cfl = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  double error_rel_l2 = 0.0;
  double wall_time = 0.0;   // integration loop only
  double setup_time = 0.0;  // scheme construction and fitting
  double mass_ratio = 1.0;
  std::size_t mood_events = 0;
  bool stable = true;
  std::string failure;
};

/// Optional outputs of a single run.
struct RunOutputs {
  std::vector<Vec2> positions;
  std::vector<double> initial;
  std::vector<double> final_state;
  std::vector<double> exact;
  std::vector<StepDiagnostics> history;
};

/// Builds the grid, integrates, and evaluates the run. Instabilities are
/// recorded in the result rather than thrown.
ExperimentRecord run_case(const CaseSpec& spec, const Combo& combo, RunOutputs* out = nullptr,
                          const StepObserver& observer = {});

struct ConvergenceConfig {
  std::string init = "gauss1d";
  std::vector<Combo> combos;
  std::vector<std::size_t> n_values{100, 200, 400, 800, 1600};
  double randomness = 0.5;
  double t_end = 2.5;
  std::size_t seeds = 1;
  std::uint64_t master_seed = 0;
  ModelParams params;
};

struct OrderFit {
  std::string label;
  double order = 0.0;              // least squares over the finest three sizes
  double finest_pair_order = 0.0;  // from the two finest sizes
  bool complete = true;            // false if some run was unstable
};

struct ConvergenceResult {
  std::vector<ExperimentRecord> records;
  std::vector<OrderFit> orders;
};

ConvergenceResult run_convergence(const ConvergenceConfig& cfg);

struct DirichletConfig {
  std::size_t n = 100;
  double randomness = 0.5;
  double cfl = 1.0 / 3.0;
  double t_end = 5.0;
  std::vector<Combo> combos;
  std::uint64_t seed = 0;
  ModelParams params;
};

struct DirichletProfile {
  ExperimentRecord record;
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> exact;
  double overshoot = 0.0;   // max(u) - 1
  double undershoot = 0.0;  // min(u)
  double boundary_value = 0.0;
};

std::vector<DirichletProfile> run_dirichlet(const DirichletConfig& cfg);

struct ConservationConfig {
  std::size_t n = 100;
  double randomness = 0.5;
  double cfl = 0.25;
  double t_end = 200.0;
  std::vector<Combo> combos;
  std::uint64_t seed = 0;
  /// Keep every k-th step of the mass series.
  std::size_t sample_every = 1;
  ModelParams params;
};

struct MassSeries {
  ExperimentRecord record;
  std::vector<double> t;
  std::vector<double> mass_ratio;
};

std::vector<MassSeries> run_conservation(const ConservationConfig& cfg);

struct EfficiencyConfig {
  int dim = 1;
  std::string init = "gauss1d";
  std::vector<Combo> combos;
  std::vector<std::size_t> n_values{30, 46, 72, 111, 171, 264, 407, 629, 971, 1500};
  double randomness = 0.5;
  double t_end = 7.5;
  std::size_t seeds = 10;
  std::uint64_t master_seed = 0;
  ModelParams params;
};

struct EfficiencyRow {
  std::string label;
  std::size_t n = 0;
  std::size_t runs = 0;
  std::size_t unstable = 0;
  double mean_error = 0.0;
  double mean_wall_time = 0.0;
  double mean_setup_time = 0.0;
};

struct EfficiencyResult {
  std::vector<ExperimentRecord> records;
  std::vector<EfficiencyRow> rows;
};

EfficiencyResult run_efficiency(const EfficiencyConfig& cfg);

struct LongRunConfig {
  std::string init = "box2d";
  std::size_t n = 20;
  double randomness = 0.5;
  double cfl = 0.1;
  double t_end = 42.42640687119285;  // 30 sqrt(2)
  std::size_t grids = 50;
  std::vector<Combo> combos;
  std::uint64_t master_seed = 0;
  /// Abort a run once max |u| exceeds this (counted as non-finite).
  double blowup_bound = 10.0;
  /// Trailing fraction of the run in which max |u| may not exceed the
  /// initial max |u|. The exact solution never does, and a stable scheme
  /// only dissipates.
  double late_window = 0.5;
  ModelParams params;
};

struct LongRunRow {
  std::string label;
  std::size_t grids = 0;
  std::size_t finite = 0;  // runs that completed without blowing up
  std::size_t stable = 0;  // finite and without late growth
  double stable_fraction = 0.0;
};

struct LongRunResult {
  std::vector<ExperimentRecord> records;
  std::vector<LongRunRow> rows;
};

LongRunResult run_long_time_stability(const LongRunConfig& cfg);

/// Seed for repetition `k` of a study from its master seed.
std::uint64_t run_seed(std::uint64_t master, std::size_t k);

void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records);
void write_orders_csv(std::ostream& os, std::span<const OrderFit> orders);
void write_profiles_csv(std::ostream& os, std::span<const DirichletProfile> profiles);
void write_mass_csv(std::ostream& os, std::span<const MassSeries> series);
void write_efficiency_csv(std::ostream& os, std::span<const EfficiencyRow> rows);
void write_long_run_csv(std::ostream& os, std::span<const LongRunRow> rows);

}  // namespace meshless
