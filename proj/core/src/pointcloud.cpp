#include "meshless/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "meshless/errors.hpp"

namespace meshless {

namespace {

// Distances within this relative slack of h_max count as inside, so lattice
// points exactly on the radius are not lost to rounding.
constexpr double kRadiusSlack = 1e-12;

double open_unit_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double wrap(double x, double lo, double hi) {
  const double length = hi - lo;
  if (x < lo) x += length;
  if (x >= hi) x -= length;
  return x;
}

}  // namespace

void Domain::validate() const {
  if (dim != 1 && dim != 2) throw InvalidArgument("domain dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (!(hi[a] > lo[a])) throw InvalidArgument("domain requires hi > lo on every axis");
  }
}

Domain Domain::periodic_box(int dim, double lo, double hi) {
  Domain d;
  d.dim = dim;
  d.lo = {lo, lo};
  d.hi = {hi, hi};
  d.periodic = {true, true};
  d.validate();
  return d;
}

Domain Domain::bounded_interval(double lo, double hi) {
  Domain d;
  d.dim = 1;
  d.lo = {lo, lo};
  d.hi = {hi, hi};
  d.periodic = {false, false};
  d.validate();
  return d;
}

double lattice_spacing(const Domain& domain, std::size_t n_per_axis, int axis) {
  if (n_per_axis < 2) throw InvalidArgument("need at least two nodes per axis");
  const double n = static_cast<double>(domain.periodic[axis] ? n_per_axis : n_per_axis - 1);
  return domain.length(axis) / n;
}

double default_neighbor_radius(int dim, double dx) {
  return dim == 1 ? 3.5 * dx : std::sqrt(34.0) * dx;
}

Vec2 periodic_delta(const Vec2& xi, const Vec2& xj, const Domain& domain) {
  Vec2 d{0.0, 0.0};
  for (int a = 0; a < domain.dim; ++a) {
    double v = xj[a] - xi[a];
    if (domain.periodic[a]) {
      const double length = domain.length(a);
      if (v > 0.5 * length) {
        v -= length;
      } else if (v < -0.5 * length) {
        v += length;
      }
    }
    d[a] = v;
  }
  return d;
}

StencilSet::StencilSet(const std::vector<std::vector<std::size_t>>& lists) {
  offsets_.reserve(lists.size() + 1);
  std::size_t total = 0;
  for (const auto& l : lists) total += l.size();
  indices_.reserve(total);
  for (const auto& l : lists) {
    indices_.insert(indices_.end(), l.begin(), l.end());
    offsets_.push_back(indices_.size());
  }
}

std::size_t StencilSet::min_count() const {
  std::size_t m = size() == 0 ? 0 : static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < size(); ++i) m = std::min(m, (*this)[i].size());
  return m;
}

std::size_t StencilSet::max_count() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, (*this)[i].size());
  return m;
}

StencilSet build_neighborhoods(const Domain& domain, std::span<const Vec2> positions,
                               double h_max) {
  if (!(h_max > 0.0)) throw InvalidArgument("neighbour radius must be positive");
  const std::size_t n = positions.size();
  const double h2 = h_max * h_max * (1.0 + kRadiusSlack);
  std::vector<std::vector<std::size_t>> lists(n);

  auto consider = [&](std::size_t i, std::size_t j) {
    const double d2 = norm2(periodic_delta(positions[i], positions[j], domain));
    if (d2 == 0.0) {
      throw InvalidArgument("coincident points " + std::to_string(i) + " and " +
                            std::to_string(j));
    }
    if (d2 <= h2) lists[i].push_back(j);
  };

  // Bucket grid with cells no smaller than h_max; periodic axes need at least
  // three cells so the 3^dim sweep never visits a cell twice.
  std::array<int, 2> cells{1, 1};
  bool use_buckets = true;
  for (int a = 0; a < domain.dim; ++a) {
    cells[a] = static_cast<int>(std::floor(domain.length(a) / h_max));
    if (cells[a] < 3) use_buckets = false;
  }

  if (!use_buckets) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) consider(i, j);
      }
    }
    return StencilSet(lists);
  }

  auto cell_of = [&](const Vec2& x, int a) {
    const double w = domain.length(a) / cells[a];
    int c = static_cast<int>(std::floor((x[a] - domain.lo[a]) / w));
    return std::clamp(c, 0, cells[a] - 1);
  };
  const std::size_t ncell = static_cast<std::size_t>(cells[0]) * cells[1];
  std::vector<std::vector<std::size_t>> bucket(ncell);
  for (std::size_t i = 0; i < n; ++i) {
    const int cx = cell_of(positions[i], 0);
    const int cy = domain.dim == 2 ? cell_of(positions[i], 1) : 0;
    bucket[static_cast<std::size_t>(cy) * cells[0] + cx].push_back(i);
  }

  const int ry = domain.dim == 2 ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int cx = cell_of(positions[i], 0);
    const int cy = domain.dim == 2 ? cell_of(positions[i], 1) : 0;
    for (int oy = -ry; oy <= ry; ++oy) {
      int y = cy + oy;
      if (domain.dim == 2) {
        if (domain.periodic[1]) {
          y = (y + cells[1]) % cells[1];
        } else if (y < 0 || y >= cells[1]) {
          continue;
        }
      }
      for (int ox = -1; ox <= 1; ++ox) {
        int x = cx + ox;
        if (domain.periodic[0]) {
          x = (x + cells[0]) % cells[0];
        } else if (x < 0 || x >= cells[0]) {
          continue;
        }
        for (std::size_t j : bucket[static_cast<std::size_t>(y) * cells[0] + x]) {
          if (j != i) consider(i, j);
        }
      }
    }
    std::sort(lists[i].begin(), lists[i].end());
  }
  return StencilSet(lists);
}

CellSizes cell_sizes(const Domain& domain, std::span<const Vec2> positions, double base_spacing) {
  const std::size_t n = positions.size();
  CellSizes out;
  out.delta.assign(n, base_spacing);
  out.quadrature.assign(n, base_spacing * base_spacing);
  if (domain.dim == 2 || n < 2) {
    if (domain.dim == 1) out.quadrature = out.delta;
    return out;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return positions[a][0] < positions[b][0];
  });
  const bool periodic = domain.periodic[0];
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    double width;
    if (periodic) {
      const std::size_t prev = order[(k + n - 1) % n];
      const std::size_t next = order[(k + 1) % n];
      width = 0.5 * periodic_delta(positions[prev], positions[next], domain)[0];
      if (n == 2) width = 0.5 * domain.length(0);
    } else if (k == 0) {
      width = positions[order[1]][0] - positions[i][0];
    } else if (k + 1 == n) {
      width = positions[i][0] - positions[order[k - 1]][0];
    } else {
      width = 0.5 * (positions[order[k + 1]][0] - positions[order[k - 1]][0]);
    }
    out.delta[i] = width;
  }
  out.quadrature = out.delta;
  return out;
}

PointCloud::PointCloud(Domain domain, std::vector<Vec2> positions, double base_spacing,
                       double h_max)
    : domain_(domain),
      positions_(std::move(positions)),
      base_spacing_(base_spacing),
      h_max_(h_max) {
  domain_.validate();
  if (!(base_spacing_ > 0.0)) throw InvalidArgument("base spacing must be positive");
  for (const auto& x : positions_) {
    for (int a = 0; a < domain_.dim; ++a) {
      if (!(x[a] >= domain_.lo[a] && x[a] <= domain_.hi[a])) {
        throw InvalidArgument("point outside the domain");
      }
    }
  }
  neighbors_ = build_neighborhoods(domain_, positions_, h_max_);
  deltas_.reserve(neighbors_.total());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : neighbors_[i]) deltas_.push_back(delta(i, j));
  }
  auto cs = meshless::cell_sizes(domain_, positions_, base_spacing_);
  cell_sizes_ = std::move(cs.delta);
  quadrature_ = std::move(cs.quadrature);
  for (double c : cell_sizes_) {
    if (!(c > 0.0)) throw InvalidArgument("non-positive cell size");
  }
}

PointCloud PointCloud::with_radius(double h_max) const {
  return PointCloud(domain_, positions_, base_spacing_, h_max);
}

PointCloud generate_grid(const Domain& domain, const GridGenConfig& cfg) {
  const double dx = lattice_spacing(domain, cfg.n_per_axis);
  return generate_grid(domain, cfg, default_neighbor_radius(domain.dim, dx));
}

PointCloud generate_grid(const Domain& domain, const GridGenConfig& cfg, double h_max) {
  domain.validate();
  if (cfg.n_per_axis < 4) throw InvalidArgument("grid needs at least 4 nodes per axis");
  if (domain.dim == 2 && domain.length(0) != domain.length(1)) {
    throw InvalidArgument("2D grids require a square domain");
  }
  const double dx = lattice_spacing(domain, cfg.n_per_axis);
  if (cfg.randomness < 0.0 || cfg.randomness > 0.5 * dx) {
    throw InvalidArgument("randomness must lie in [0, dx/2]");
  }

  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = cfg.n_per_axis;
  const std::size_t total = domain.dim == 1 ? n : n * n;
  std::vector<Vec2> pos(total, Vec2{0.0, 0.0});
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t idx[2] = {k % n, k / n};
    for (int a = 0; a < domain.dim; ++a) {
      const double p = open_unit_uniform(rng);
      const bool end_node = !domain.periodic[a] && (idx[a] == 0 || idx[a] + 1 == n);
      double x = domain.lo[a] + dx * static_cast<double>(idx[a]);
      if (!end_node) x += cfg.randomness * (2.0 * p - 1.0);
      if (domain.periodic[a]) {
        x = wrap(x, domain.lo[a], domain.hi[a]);
      } else {
        x = std::clamp(x, domain.lo[a], domain.hi[a]);
      }
      pos[k][a] = x;
    }
  }
  return PointCloud(domain, std::move(pos), dx, h_max);
}

std::vector<std::size_t> upwind_stencil_1d(const PointCloud& cloud, std::size_t i, double a) {
  std::vector<std::size_t> out;
  const auto nb = cloud.neighbors(i);
  const auto dl = cloud.neighbor_deltas(i);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    if (a * dl[k][0] < 0.0) out.push_back(nb[k]);
  }
  return out;
}

StencilSet upwind_stencils_1d(const PointCloud& cloud, double a) {
  std::vector<std::vector<std::size_t>> lists(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) lists[i] = upwind_stencil_1d(cloud, i, a);
  return StencilSet(lists);
}

DirectionalStencils directional_stencils(const PointCloud& cloud, std::size_t i) {
  DirectionalStencils s;
  const auto nb = cloud.neighbors(i);
  const auto dl = cloud.neighbor_deltas(i);
  for (std::size_t k = 0; k < nb.size(); ++k) {
    (dl[k][0] < 0.0 ? s.left : s.right).push_back(nb[k]);
    if (cloud.dim() == 2) (dl[k][1] < 0.0 ? s.bottom : s.top).push_back(nb[k]);
  }
  return s;
}

StencilSet directional_stencil_set(const PointCloud& cloud, Side side) {
  std::vector<std::vector<std::size_t>> lists(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto s = directional_stencils(cloud, i);
    switch (side) {
      case Side::left: lists[i] = std::move(s.left); break;
      case Side::right: lists[i] = std::move(s.right); break;
      case Side::bottom: lists[i] = std::move(s.bottom); break;
      case Side::top: lists[i] = std::move(s.top); break;
    }
  }
  return StencilSet(lists);
}

}  // namespace meshless
