#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "meshless/errors.hpp"
#include "meshless/stability.hpp"
#include "oracles.hpp"

using namespace meshless;

namespace {

PointCloud cloud1d(std::size_t n, double frac, std::uint64_t seed) {
  const Domain d = Domain::periodic_box(1, -5.0, 5.0);
  const double dx = lattice_spacing(d, n);
  return generate_grid(d, GridGenConfig{n, frac * dx, seed});
}

double max_real(const std::vector<std::complex<double>>& ev) {
  double m = -INFINITY;
  for (const auto& z : ev) m = std::max(m, z.real());
  return m;
}

}  // namespace

TEST_CASE("spectrum of small matrices with known eigenvalues") {
  Eigen::MatrixXd diag = Eigen::Vector3d(-1.0, 2.0, -3.5).asDiagonal();
  auto rep = compute_spectrum(diag, false);
  std::vector<double> re;
  for (const auto& z : rep.eigenvalues) {
    CHECK(std::abs(z.imag()) < 1e-15);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re == std::vector<double>{-3.5, -1.0, 2.0});
  CHECK(rep.max_real == 2.0);
  CHECK(rep.unstable);

  Eigen::Matrix2d rot;
  rot << 0.0, -1.0, 1.0, 0.0;
  rep = compute_spectrum(rot, false);
  REQUIRE(rep.eigenvalues.size() == 2);
  for (const auto& z : rep.eigenvalues) {
    CHECK(std::abs(z.real()) < 1e-15);
    CHECK(std::abs(std::abs(z.imag()) - 1.0) < 1e-15);
  }
  CHECK_FALSE(rep.unstable);
  CHECK_THROWS_AS(compute_spectrum(Eigen::MatrixXd(2, 3)), InvalidArgument);
}

TEST_CASE("nearest-neighbour upwind matrix matches the circulant closed form") {
  const std::size_t n = 64;
  const Domain d = Domain::periodic_box(1, -5.0, 5.0);
  const double dx = lattice_spacing(d, n);
  const auto c = generate_grid(d, GridGenConfig{n, 0.0, 0}, 1.0 * dx);
  const auto setup = SchemeSetup::defaults(c);
  const auto m = assemble(*make_scheme("upwind1", c, setup));
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(m(i, i) == doctest::Approx(-1.0 / dx).epsilon(1e-14));
    CHECK(m(i, (i + n - 1) % n) == doctest::Approx(1.0 / dx).epsilon(1e-14));
  }
  const auto rep = compute_spectrum(m);
  const auto exact = oracle::upwind_circulant_spectrum(n, 1.0, dx);
  CHECK(oracle::hausdorff_one_sided(rep.eigenvalues, exact) <= 1e-10);
  CHECK(oracle::hausdorff_one_sided(exact, rep.eigenvalues) <= 1e-10);
  CHECK(rep.max_real <= kInstabilityThreshold);
}

TEST_CASE("wider upwind and MUSCL stencils on a uniform grid match their DFT symbols") {
  const std::size_t n = 50;
  const auto c = cloud1d(n, 0.0, 0);
  const auto setup = SchemeSetup::defaults(c);
  for (const char* id : {"upwind1", "upwind2", "muscl2", "muscl4"}) {
    const auto m = assemble(*make_scheme(id, c, setup));
    // Circulant symbol from the first row.
    std::vector<std::complex<double>> symbol;
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += m(0, j) * std::polar(1.0, 2.0 * std::numbers::pi * double(k * j) / double(n));
      }
      symbol.push_back(s);
    }
    const auto rep = compute_spectrum(m);
    const double scale = m.cwiseAbs().maxCoeff();
    CHECK(oracle::hausdorff_one_sided(rep.eigenvalues, symbol) <= 1e-10 * scale);
    CHECK(oracle::hausdorff_one_sided(symbol, rep.eigenvalues) <= 1e-10 * scale);
  }
}

TEST_CASE("assembled operator reproduces evaluate on random probes") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int dim : {1, 2}) {
    const Domain d = Domain::periodic_box(dim, -5.0, 5.0);
    const std::size_t n = dim == 1 ? 120 : 20;
    const auto c = generate_grid(d, GridGenConfig{n, 0.5 * lattice_spacing(d, n), 3});
    const auto setup = SchemeSetup::defaults(c);
    for (const auto& id : scheme_ids()) {
      if (id == "weno2" || (dim == 1 && id == "positive2d") || (dim == 2 && id == "upwind1")) {
        continue;
      }
      CAPTURE(id);
      CAPTURE(dim);
      const auto s = make_scheme(id, c, setup);
      const auto m = assemble(*s);
      CHECK(m.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-9 * m.cwiseAbs().maxCoeff());
      for (int probe = 0; probe < 20; ++probe) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(c.size()));
        for (auto& v : u) v = gauss(rng);
        std::vector<double> out(c.size());
        s->evaluate(std::span<const double>(u.data(), c.size()), out);
        const Eigen::VectorXd mu = m * u;
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
          err = std::max(err, std::abs(mu(static_cast<Eigen::Index>(i)) - out[i]));
          ref = std::max(ref, std::abs(out[i]));
        }
        REQUIRE(err <= 1e-12 * ref);
      }
    }
  }
}

TEST_CASE("assembly rejects nonlinear schemes and is deterministic") {
  const auto c = cloud1d(40, 0.5, 2);
  const auto setup = SchemeSetup::defaults(c);
  CHECK_THROWS_AS(assemble(*make_scheme("weno2", c, setup)), InvalidArgument);
  const auto s = make_scheme("muscl2", c, setup);
  CHECK(assemble(*s) == assemble(*s));
}

TEST_CASE("computed eigenvalues are eigenvalues of the operator") {
  const auto c = cloud1d(100, 0.5, 7);
  const auto setup = SchemeSetup::defaults(c);
  const auto m = assemble(*make_scheme("muscl4", c, setup));
  const auto rep = compute_spectrum(m);
  REQUIRE(rep.eigenvalues.size() == c.size());
  const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
  const double norm = m.operatorNorm();
  const auto n = static_cast<Eigen::Index>(c.size());
  for (std::size_t k = 0; k < rep.eigenvalues.size(); k += 9) {
    const Eigen::MatrixXcd shifted = mc - rep.eigenvalues[k] * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    CHECK(svd.singularValues()(n - 1) / norm <= 1e-8);
  }
}

TEST_CASE("deflating the constant mode leaves the spectrum unchanged") {
  const auto c = cloud1d(80, 0.5, 9);
  const auto setup = SchemeSetup::defaults(c);
  const auto m = assemble(*make_scheme("upwind2", c, setup));
  const auto a = compute_spectrum(m, true);
  const auto b = compute_spectrum(m, false);
  const double scale = m.cwiseAbs().maxCoeff();
  CHECK(oracle::hausdorff_one_sided(a.eigenvalues, b.eigenvalues) <= 1e-9 * scale);
  CHECK(oracle::hausdorff_one_sided(b.eigenvalues, a.eigenvalues) <= 1e-9 * scale);
  CHECK(std::abs(a.eigenvalues.front()) <= 1e-12 * scale);
}

TEST_CASE("relabelling the points does not change the spectrum") {
  const auto base = cloud1d(90, 0.5, 21);
  std::vector<std::size_t> perm(base.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  std::vector<Vec2> pos(base.size());
  for (std::size_t k = 0; k < perm.size(); ++k) pos[k] = base.position(perm[k]);
  const PointCloud shuffled(base.domain(), pos, base.base_spacing(), base.h_max());
  for (const char* id : {"upwind2", "muscl2", "muscl3"}) {
    const auto a = compute_spectrum(assemble(*make_scheme(id, base, SchemeSetup::defaults(base))));
    const auto b =
        compute_spectrum(assemble(*make_scheme(id, shuffled, SchemeSetup::defaults(shuffled))));
    CHECK(std::abs(a.max_real - b.max_real) <= 1e-10);
    CHECK(a.unstable == b.unstable);
  }
}

TEST_CASE("MUSCL spectra on a uniform grid are stable") {
  const auto c = cloud1d(100, 0.0, 0);
  const auto setup = SchemeSetup::defaults(c);
  for (const char* id : {"muscl1", "muscl2", "muscl3", "muscl4"}) {
    CAPTURE(id);
    CHECK(compute_spectrum(assemble(*make_scheme(id, c, setup))).max_real <= 1e-11);
  }
}

TEST_CASE("balancing preserves eigenvalues") {
  Eigen::Matrix3d m;
  m << 1.0, 1e6, 0.0, 1e-6, 2.0, 1e3, 0.0, 1e-3, 3.0;
  Eigen::MatrixXd b = m;
  balance(b);
  const Eigen::VectorXcd e0 = Eigen::EigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  const Eigen::VectorXcd e1 = Eigen::EigenSolver<Eigen::MatrixXd>(b).eigenvalues();
  std::vector<std::complex<double>> a(e0.begin(), e0.end()), c(e1.begin(), e1.end());
  CHECK(oracle::hausdorff_one_sided(a, c) <= 1e-9);
  CHECK(b.cwiseAbs().maxCoeff() < 1e5);
}

TEST_CASE("Runge-Kutta stability boundaries") {
  const auto euler = rk_stability_boundary(ButcherTableau::forward_euler(), 360);
  REQUIRE(!euler.empty());
  for (const auto& z : euler) CHECK(std::abs(std::abs(z + 1.0) - 1.0) <= 1e-10);

  CHECK(rk_real_axis_crossing(ButcherTableau::forward_euler()) == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(rk_real_axis_crossing(ButcherTableau::ralston2()) == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(rk_real_axis_crossing(ButcherTableau::ssprk3()) == doctest::Approx(-2.5127453266).epsilon(1e-8));
  CHECK(rk_real_axis_crossing(ButcherTableau::rk4()) == doctest::Approx(-2.7852935634).epsilon(1e-8));

  // Real coefficients: the boundary is symmetric about the real axis.
  const auto rk4 = rk_stability_boundary(ButcherTableau::rk4(), 720);
  for (const auto& z : rk4) {
    CHECK(std::abs(std::abs(ButcherTableau::rk4().stability_function(z)) - 1.0) <= 1e-10);
    const auto mirror = std::conj(z);
    double best = INFINITY;
    for (const auto& w : rk4) best = std::min(best, std::abs(w - mirror));
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("seed derivation is deterministic and spreads streams") {
  CHECK(derive_seed(0, 0) == derive_seed(0, 0));
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(0, 0) != derive_seed(1, 0));
  CHECK(study_grid_seed(3, 1, 0, 4) == study_grid_seed(3, 1, 0, 4));
  CHECK(study_grid_seed(3, 1, 0, 4) != study_grid_seed(3, 0, 1, 4));
}

TEST_CASE("small sensitivity study") {
  SensitivityConfig cfg;
  cfg.schemes = {"upwind1", "muscl1", "muscl2"};
  cfg.n_grids = 4;
  cfg.n_values = {60};
  std::size_t calls = 0;
  const auto rows = sensitivity_study(cfg, [&](const std::string&, std::size_t, std::size_t,
                                               const SpectrumReport&) { ++calls; });
  CHECK(calls == 12);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].pct_unstable == 0.0);
  CHECK(rows[1].pct_unstable == 100.0);
  CHECK(rows[2].pct_unstable == 0.0);
  CHECK(rows[1].worst_max_real > kInstabilityThreshold);
  const auto again = sensitivity_study(cfg);
  CHECK(again[1].worst_max_real == rows[1].worst_max_real);

  std::ostringstream os;
  write_sensitivity_csv(os, rows);
  CHECK(os.str().rfind("scheme,N,r,grids,unstable,pct_unstable,worst_max_real\nupwind1,60,0.5,4,0,0,",
                       0) == 0);
}

TEST_CASE("spectrum and boundary CSV headers") {
  std::ostringstream a, b;
  write_spectrum_csv(a, {});
  CHECK(a.str() == "scheme,re,im,dt\n");
  const ButcherTableau t[] = {ButcherTableau::forward_euler()};
  write_rk_boundary_csv(b, t);
  CHECK(b.str().rfind("order,re,im\n1,", 0) == 0);
}
