#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "meshless/mls.hpp"
#include "meshless/mood.hpp"
#include "meshless/pointcloud.hpp"
#include "meshless/schemes.hpp"
#include "meshless/stability.hpp"
#include "meshless/timeint.hpp"

using namespace meshless;

namespace {

// Lattice perturbed by up to half a spacing.
PointCloud cloud(int dim, std::size_t n) {
  const auto domain = Domain::periodic_box(dim, -5.0, 5.0);
  return generate_grid(domain, GridGenConfig{n, 0.5 * lattice_spacing(domain, n), 42});
}

PointCloud cloud_1d(std::size_t n) { return cloud(1, n); }
PointCloud cloud_2d(std::size_t n) { return cloud(2, n); }

std::vector<double> bump(const PointCloud& cloud) {
  std::vector<double> u(cloud.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& x = cloud.position(i);
    u[i] = std::exp(-(x[0] * x[0] + x[1] * x[1]));
  }
  return u;
}

void BM_Fit1D(benchmark::State& state) {
  const auto cloud = cloud_1d(static_cast<std::size_t>(state.range(0)));
  FitOptions opts;
  opts.degree = static_cast<int>(state.range(1));
  opts.weight = WeightConfig::defaults(1, cloud.base_spacing(), cloud.h_max());
  for (auto _ : state) benchmark::DoNotOptimize(fit(cloud, cloud.neighbors(), opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_Fit1D)->Args({400, 2})->Args({400, 4})->Args({1600, 4});

void BM_Fit2D(benchmark::State& state) {
  const auto cloud = cloud_2d(static_cast<std::size_t>(state.range(0)));
  FitOptions opts;
  opts.degree = static_cast<int>(state.range(1));
  opts.weight = WeightConfig::defaults(2, cloud.base_spacing(), cloud.h_max());
  for (auto _ : state) benchmark::DoNotOptimize(fit(cloud, cloud.neighbors(), opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_Fit2D)->Args({30, 1})->Args({30, 2})->Args({50, 2});

void evaluate_scheme(benchmark::State& state, const PointCloud& cloud, const std::string& id) {
  const auto scheme = make_scheme(id, cloud, SchemeSetup::defaults(cloud));
  const auto u = bump(cloud);
  std::vector<double> dudt(u.size());
  for (auto _ : state) {
    scheme->evaluate(u, dudt);
    benchmark::DoNotOptimize(dudt.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}

void BM_Evaluate1D(benchmark::State& state, const std::string& id) {
  evaluate_scheme(state, cloud_1d(static_cast<std::size_t>(state.range(0))), id);
}
BENCHMARK_CAPTURE(BM_Evaluate1D, upwind1, std::string("upwind1"))->Arg(1600);
BENCHMARK_CAPTURE(BM_Evaluate1D, upwind2, std::string("upwind2"))->Arg(1600);
BENCHMARK_CAPTURE(BM_Evaluate1D, weno2, std::string("weno2"))->Arg(1600);
BENCHMARK_CAPTURE(BM_Evaluate1D, muscl2, std::string("muscl2"))->Arg(1600);
BENCHMARK_CAPTURE(BM_Evaluate1D, muscl4, std::string("muscl4"))->Arg(1600);

void BM_Evaluate2D(benchmark::State& state, const std::string& id) {
  evaluate_scheme(state, cloud_2d(static_cast<std::size_t>(state.range(0))), id);
}
BENCHMARK_CAPTURE(BM_Evaluate2D, positive2d, std::string("positive2d"))->Arg(50);
BENCHMARK_CAPTURE(BM_Evaluate2D, weno2, std::string("weno2"))->Arg(50);
BENCHMARK_CAPTURE(BM_Evaluate2D, muscl2, std::string("muscl2"))->Arg(50);

void BM_MoodStep(benchmark::State& state) {
  const auto cloud = cloud_1d(static_cast<std::size_t>(state.range(0)));
  const auto setup = SchemeSetup::defaults(cloud);
  const auto high = make_scheme("muscl4", cloud, setup);
  const auto low = make_scheme("upwind1", cloud, setup);
  const auto u = bump(cloud);
  const auto detector = make_detector(cloud, CurvatureSource::for_scheme(*high, cloud, setup),
                                      MoodConfig::from_cloud(cloud));
  const double dt = euler_timestep(cloud, setup) / 20.0;
  const auto rk4 = ButcherTableau::rk4();
  for (auto _ : state) benchmark::DoNotOptimize(mood_step(*high, *low, u, dt, rk4, detector));
}
BENCHMARK(BM_MoodStep)->Arg(400)->Arg(1600);

void BM_Spectrum(benchmark::State& state) {
  const auto cloud = cloud_1d(static_cast<std::size_t>(state.range(0)));
  const auto scheme = make_scheme("muscl2", cloud, SchemeSetup::defaults(cloud));
  const auto op = assemble(*scheme);
  for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(op));
}
BENCHMARK(BM_Spectrum)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
