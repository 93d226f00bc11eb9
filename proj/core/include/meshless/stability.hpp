#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "meshless/schemes.hpp"
#include "meshless/timeint.hpp"

namespace meshless {

/// A spectrum is unstable when some eigenvalue has real part above this.
inline constexpr double kInstabilityThreshold = 1e-13;

/// Dense matrix L with du/dt = L u, column j = scheme.evaluate(e_j).
/// Throws InvalidArgument for nonlinear schemes.
Eigen::MatrixXd assemble(const SpatialScheme& scheme);

/// Diagonal similarity scaling by powers of two that roughly equalises row
/// and column norms. Eigenvalues are unchanged.
void balance(Eigen::MatrixXd& m);

struct SpectrumReport {
  std::string scheme;
  std::uint64_t seed = 0;
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0.0;
  bool unstable = false;
  /// Time step the spectrum may be scaled by for plotting (0 if unset).
  double dt = 0.0;
};

/// Full nonsymmetric spectrum (balancing, Hessenberg reduction, shifted QR).
/// When the constant vector is numerically in the kernel it is deflated
/// first and its eigenvalue reported as the Rayleigh quotient; this keeps
/// the round-off on that zero eigenvalue well below kInstabilityThreshold.
/// Throws NoConvergence if the QR iteration fails.
SpectrumReport compute_spectrum(const Eigen::MatrixXd& op, bool deflate_constant = true);

/// Boundary |R(z)| = 1 of the method's stability region, traced along rays
/// from the origin; points are ordered by angle.
std::vector<std::complex<double>> rk_stability_boundary(const ButcherTableau& tableau,
                                                        std::size_t rays = 720,
                                                        double max_radius = 6.0);

/// Where the stability boundary crosses the negative real axis.
double rk_real_axis_crossing(const ButcherTableau& tableau);

/// splitmix64-based child seed; the documented splitting rule for studies.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct SensitivityConfig {
  int dim = 1;
  std::vector<std::string> schemes{"upwind1", "upwind2", "muscl2", "muscl4"};
  std::size_t n_grids = 100;
  std::vector<std::size_t> n_values{100, 200, 400};
  /// Randomness as a fraction of the lattice spacing.
  std::vector<double> randomness{0.5};
  std::uint64_t master_seed = 0;
  ModelParams params;
};

/// Seed of grid `g` for size index `ni` and randomness index `ri`; shared by
/// every scheme so all schemes see the same grids.
std::uint64_t study_grid_seed(std::uint64_t master, std::size_t ni, std::size_t ri,
                              std::size_t g);

struct SensitivityRow {
  std::string scheme;
  std::size_t n = 0;
  double randomness = 0.0;  // fraction of the lattice spacing
  std::size_t grids = 0;
  std::size_t unstable = 0;
  double pct_unstable = 0.0;
  double worst_max_real = 0.0;
};

/// Called after each (scheme, grid) cell.
using SensitivityProgress =
    std::function<void(const std::string& scheme, std::size_t n, std::size_t grid,
                       const SpectrumReport&)>;

std::vector<SensitivityRow> sensitivity_study(const SensitivityConfig& cfg,
                                              const SensitivityProgress& progress = {});

void write_spectrum_csv(std::ostream& os, std::span<const SpectrumReport> spectra);
void write_sensitivity_csv(std::ostream& os, std::span<const SensitivityRow> rows);
void write_rk_boundary_csv(std::ostream& os, std::span<const ButcherTableau> tableaus);

}  // namespace meshless
