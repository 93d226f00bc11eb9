#include <charconv>

#include "meshless/errors.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

AdvectionConfig AdvectionConfig::defaults(int dim) {
  return dim == 1 ? AdvectionConfig{{1.0, 0.0}} : AdvectionConfig{{1.0, 1.0}};
}

WenoConfig WenoConfig::defaults(int dim, double dx) {
  return WenoConfig{dim == 1 ? 1e-6 : 1e-12, dx};
}

SchemeSetup SchemeSetup::defaults(const PointCloud& cloud) {
  SchemeSetup s;
  s.advection = AdvectionConfig::defaults(cloud.dim());
  s.weight = WeightConfig::defaults(cloud.dim(), cloud.base_spacing(), cloud.h_max());
  s.weno = WenoConfig::defaults(cloud.dim(), cloud.base_spacing());
  return s;
}

double ModelParams::neighbor_radius(int dim, double dx) const {
  if (!radius_factor) return default_neighbor_radius(dim, dx);
  if (!(*radius_factor > 0.0)) throw InvalidArgument("neighbour radius factor must be positive");
  return *radius_factor * dx;
}

SchemeSetup ModelParams::setup(const PointCloud& cloud) const {
  SchemeSetup s = SchemeSetup::defaults(cloud);
  if (velocity) s.advection.velocity = *velocity;
  if (alpha) {
    if (!(*alpha > 0.0)) throw InvalidArgument("weight alpha must be positive");
    s.weight.alpha = *alpha;
  }
  if (weno_epsilon) {
    if (!(*weno_epsilon > 0.0)) throw InvalidArgument("WENO epsilon must be positive");
    s.weno.epsilon = *weno_epsilon;
  }
  return s;
}

void SpatialScheme::evaluate_at(std::span<const double> u, std::span<const std::size_t>,
                                std::span<double> dudt) const {
  evaluate(u, dudt);
}

double euler_timestep(const PointCloud& cloud, const SchemeSetup& setup) {
  return cloud.dim() == 1 ? max_timestep_upwind1(cloud, setup)
                          : positive2d_max_timestep(cloud, setup);
}

std::vector<std::string> scheme_ids() {
  return {"upwind1", "upwind2", "central", "positive2d",
          "muscl1",  "muscl2",  "muscl3",  "muscl4",     "weno2"};
}

namespace {

int trailing_order(std::string_view id, std::string_view prefix) {
  if (id.substr(0, prefix.size()) != prefix) return 0;
  const auto digits = id.substr(prefix.size());
  int m = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), m);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || m < 1) return 0;
  return m;
}

}  // namespace

std::unique_ptr<SpatialScheme> make_scheme(std::string_view id, const PointCloud& cloud,
                                           const SchemeSetup& setup) {
  if (id == "upwind1" && cloud.dim() == 1) return std::make_unique<Upwind1Scheme1D>(cloud, setup);
  if (int m = trailing_order(id, "upwind"); m > 0) {
    return std::make_unique<UpwindScheme>(cloud, setup, m);
  }
  if (id == "central") return std::make_unique<CentralScheme>(cloud, setup, setup.central_degree);
  if (id == "positive2d") {
    if (cloud.dim() != 2) throw InvalidArgument("positive2d is a 2D scheme");
    return std::make_unique<Positive2DScheme>(cloud, setup);
  }
  if (int m = trailing_order(id, "muscl"); m > 0) {
    return std::make_unique<MusclScheme>(cloud, setup, m);
  }
  if (id == "weno2") return std::make_unique<WenoScheme>(cloud, setup);
  throw InvalidArgument("unknown scheme id '" + std::string(id) + "'");
}

}  // namespace meshless
