#include "meshless/stability.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "meshless/csv.hpp"
#include "meshless/errors.hpp"

namespace meshless {

Eigen::MatrixXd assemble(const SpatialScheme& scheme) {
  if (!scheme.is_linear()) {
    throw InvalidArgument("scheme '" + scheme.name() + "' is nonlinear and has no matrix");
  }
  const auto n = static_cast<Eigen::Index>(scheme.size());
  Eigen::MatrixXd m(n, n);
  std::vector<double> e(scheme.size(), 0.0), col(scheme.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    scheme.evaluate(e, col);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
  }
  return m;
}

void balance(Eigen::MatrixXd& m) {
  constexpr double radix = 2.0;
  const Eigen::Index n = m.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

namespace {

// True when the constant vector is numerically in the kernel (every scheme
// acts on differences, so its rows sum to zero up to round-off).
bool constant_in_kernel(const Eigen::MatrixXd& op) {
  const double scale = op.cwiseAbs().rowwise().sum().maxCoeff();
  const double residual = op.rowwise().sum().cwiseAbs().maxCoeff();
  return residual <= 1e3 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
}

std::vector<std::complex<double>> qr_eigenvalues(Eigen::MatrixXd m) {
  if (m.rows() == 0) return {};
  balance(m);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw NoConvergence("eigenvalue QR iteration failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

SpectrumReport compute_spectrum(const Eigen::MatrixXd& op, bool deflate_constant) {
  if (op.rows() != op.cols()) throw InvalidArgument("operator matrix must be square");
  SpectrumReport rep;
  const Eigen::Index n = op.rows();
  if (n == 0) return rep;
  if (deflate_constant && n > 1 && constant_in_kernel(op)) {
    // Orthogonal similarity with a Householder reflector mapping e_1 to the
    // normalised constant vector; the first column then vanishes below the
    // diagonal and the remaining block carries the other eigenvalues.
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    w(0) -= 1.0;
    w.normalize();
    Eigen::MatrixXd m = op - 2.0 * w * (w.transpose() * op);
    m -= 2.0 * (m * w) * w.transpose();
    rep.eigenvalues = qr_eigenvalues(m.bottomRightCorner(n - 1, n - 1));
    // Rayleigh quotient of the constant mode.
    rep.eigenvalues.insert(rep.eigenvalues.begin(), op.sum() / static_cast<double>(n));
  } else {
    rep.eigenvalues = qr_eigenvalues(op);
  }
  rep.max_real = -std::numeric_limits<double>::infinity();
  for (const auto& z : rep.eigenvalues) rep.max_real = std::max(rep.max_real, z.real());
  rep.unstable = rep.max_real > kInstabilityThreshold;
  return rep;
}

std::vector<std::complex<double>> rk_stability_boundary(const ButcherTableau& tableau,
                                                        std::size_t rays, double max_radius) {
  const auto poly = tableau.stability_polynomial();
  auto excess = [&](std::complex<double> z) {
    std::complex<double> r = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) r = r * z + *it;
    return std::abs(r) - 1.0;
  };
  std::vector<std::complex<double>> out;
  const double step = 1e-3;
  for (std::size_t k = 0; k < rays; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
    const std::complex<double> dir = std::polar(1.0, theta);
    // First exit from the region along the ray; rays that start outside are skipped.
    double lo = step;
    if (excess(lo * dir) > 0.0) continue;
    double hi = lo;
    bool found = false;
    while (hi < max_radius) {
      hi = lo + step;
      if (excess(hi * dir) > 0.0) {
        found = true;
        break;
      }
      lo = hi;
    }
    if (!found) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid * dir) > 0.0 ? hi : lo) = mid;
    }
    out.push_back(0.5 * (lo + hi) * dir);
  }
  return out;
}

double rk_real_axis_crossing(const ButcherTableau& tableau) {
  auto excess = [&](double x) { return std::abs(tableau.stability_function(x)) - 1.0; };
  double lo = -1e-3;
  double hi = lo;
  while (excess(hi) <= 0.0) {
    lo = hi;
    hi -= 1e-3;
    if (hi < -100.0) throw NoConvergence("no real-axis crossing of the stability boundary");
  }
  // Bracket [hi, lo]: excess(hi) > 0 >= excess(lo).
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t study_grid_seed(std::uint64_t master, std::size_t ni, std::size_t ri,
                              std::size_t g) {
  return derive_seed(derive_seed(derive_seed(master, ni), ri), g);
}

std::vector<SensitivityRow> sensitivity_study(const SensitivityConfig& cfg,
                                              const SensitivityProgress& progress) {
  const Domain domain = Domain::periodic_box(cfg.dim, -5.0, 5.0);
  std::vector<SensitivityRow> rows;
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    const std::size_t n = cfg.n_values[ni];
    const double dx = lattice_spacing(domain, n);
    for (std::size_t ri = 0; ri < cfg.randomness.size(); ++ri) {
      const double frac = cfg.randomness[ri];
      std::vector<SensitivityRow> cell(cfg.schemes.size());
      for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
        cell[s].scheme = cfg.schemes[s];
        cell[s].n = n;
        cell[s].randomness = frac;
        cell[s].worst_max_real = -std::numeric_limits<double>::infinity();
      }
      for (std::size_t g = 0; g < cfg.n_grids; ++g) {
        GridGenConfig gc{n, frac * dx, study_grid_seed(cfg.master_seed, ni, ri, g)};
        const PointCloud cloud =
            generate_grid(domain, gc, cfg.params.neighbor_radius(cfg.dim, dx));
        const SchemeSetup setup = cfg.params.setup(cloud);
        for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
          const auto scheme = make_scheme(cfg.schemes[s], cloud, setup);
          SpectrumReport rep = compute_spectrum(assemble(*scheme));
          rep.scheme = cfg.schemes[s];
          rep.seed = gc.seed;
          auto& row = cell[s];
          ++row.grids;
          if (rep.unstable) ++row.unstable;
          row.worst_max_real = std::max(row.worst_max_real, rep.max_real);
          if (progress) progress(cfg.schemes[s], n, g, rep);
        }
      }
      for (auto& row : cell) {
        row.pct_unstable = row.grids ? 100.0 * static_cast<double>(row.unstable) /
                                           static_cast<double>(row.grids)
                                     : 0.0;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_spectrum_csv(std::ostream& os, std::span<const SpectrumReport> spectra) {
  csv::Writer w(os, {"scheme", "re", "im", "dt"});
  for (const auto& s : spectra) {
    for (const auto& z : s.eigenvalues) w.row(s.scheme, z.real(), z.imag(), s.dt);
  }
}

void write_sensitivity_csv(std::ostream& os, std::span<const SensitivityRow> rows) {
  csv::Writer w(os, {"scheme", "N", "r", "grids", "unstable", "pct_unstable", "worst_max_real"});
  for (const auto& r : rows) {
    w.row(r.scheme, r.n, r.randomness, r.grids, r.unstable, r.pct_unstable, r.worst_max_real);
  }
}

void write_rk_boundary_csv(std::ostream& os, std::span<const ButcherTableau> tableaus) {
  csv::Writer w(os, {"order", "re", "im"});
  for (const auto& t : tableaus) {
    for (const auto& z : rk_stability_boundary(t)) w.row(t.order, z.real(), z.imag());
  }
}

}  // namespace meshless
