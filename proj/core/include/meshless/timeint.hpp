#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meshless/mood.hpp"
#include "meshless/pointcloud.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

/// Explicit Runge-Kutta method; `a` is stored dense and must be strictly
/// lower triangular.
struct ButcherTableau {
  std::string name;
  int order = 1;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;

  std::size_t stages() const { return b.size(); }
  /// Throws InvalidArgument if not explicit or sum(b) != 1.
  void validate() const;
  /// Coefficients p_0..p_s of R(z) = sum_k p_k z^k: p_0 = 1, p_k = b^T A^{k-1} 1.
  std::vector<double> stability_polynomial() const;
  std::complex<double> stability_function(std::complex<double> z) const;

  static ButcherTableau forward_euler();
  static ButcherTableau ralston2();
  static ButcherTableau ssprk3();
  static ButcherTableau rk4();
  /// Accepts euler, ralston2 (rk2), ssprk3 (rk3), rk4.
  static ButcherTableau by_name(std::string_view name);
};

/// du/dt = f(u).
using RhsFunction = std::function<void(std::span<const double>, std::span<double>)>;

std::vector<double> rk_step(const RhsFunction& f, std::span<const double> u, double dt,
                            const ButcherTableau& tableau);
std::vector<double> rk_step(const SpatialScheme& scheme, std::span<const double> u, double dt,
                            const ButcherTableau& tableau);

struct MoodStepResult {
  std::vector<double> u;
  MoodReport report;
};

/// Full RK step with the high-order scheme, then one forward-Euler step of
/// the fallback scheme from u at every point the detector rejects.
MoodStepResult mood_step(const SpatialScheme& high, const SpatialScheme& fallback,
                         std::span<const double> u, double dt, const ButcherTableau& tableau,
                         const MoodDetector& detector);

struct IntegrationConfig {
  std::string scheme = "upwind1";
  std::string tableau = "ssprk3";
  /// dt = cfl * euler_timestep(cloud, setup).
  double cfl = 0.05;
  double t_end = 1.0;
  bool mood = false;
  /// Empty: upwind1 in 1D, positive2d in 2D.
  std::string fallback;
  MoodMode mood_mode = MoodMode::relaxed_u2;
  /// Abort with NonFiniteState when max |u| exceeds this.
  double blowup_bound = std::numeric_limits<double>::infinity();
  /// Keep per-step diagnostics (the observer is called regardless).
  bool record_steps = true;
};

struct StepDiagnostics {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t mood_events = 0;
};

struct IntegrationResult {
  std::vector<double> u;
  double t = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t mood_events = 0;
  std::vector<StepDiagnostics> history;  // step 0 is the initial state
  double setup_seconds = 0.0;
  double run_seconds = 0.0;
};

/// Called after every step with its diagnostics, the new state and the MOOD
/// report (null without MOOD).
using StepObserver =
    std::function<void(const StepDiagnostics&, std::span<const double>, const MoodReport*)>;

std::string default_fallback(int dim);

IntegrationResult integrate(const PointCloud& cloud, const SchemeSetup& setup,
                            const IntegrationConfig& cfg, std::span<const double> u0,
                            const StepObserver& observer = {});

void write_diagnostics_csv(std::ostream& os, std::span<const StepDiagnostics> steps);

}  // namespace meshless
