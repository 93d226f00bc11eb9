#include <istream>
#include <ostream>
#include <string>

#include "meshless/csv.hpp"
#include "meshless/errors.hpp"
#include "meshless/pointcloud.hpp"

namespace meshless {

void write_grid_csv(std::ostream& os, const PointCloud& cloud) {
  csv::Writer meta(os, {"dim", "N", "hmax", "dx"});
  meta.row(cloud.dim(), cloud.size(), cloud.h_max(), cloud.base_spacing());
  if (cloud.dim() == 1) {
    csv::Writer rows(os, {"index", "x"});
    for (std::size_t i = 0; i < cloud.size(); ++i) rows.row(i, cloud.position(i)[0]);
  } else {
    csv::Writer rows(os, {"index", "x", "y"});
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      rows.row(i, cloud.position(i)[0], cloud.position(i)[1]);
    }
  }
}

PointCloud read_grid_csv(std::istream& is, const Domain& domain) {
  std::string line;
  auto next = [&]() {
    if (!std::getline(is, line)) throw InvalidArgument("grid csv: unexpected end of input");
    return csv::split(line);
  };
  if (next() != std::vector<std::string>{"dim", "N", "hmax", "dx"}) {
    throw InvalidArgument("grid csv: bad metadata header");
  }
  const auto meta = next();
  if (meta.size() != 4) throw InvalidArgument("grid csv: bad metadata row");
  const int dim = static_cast<int>(csv::parse_int(meta[0]));
  const auto n = static_cast<std::size_t>(csv::parse_int(meta[1]));
  const double h_max = csv::parse_double(meta[2]);
  const double dx = csv::parse_double(meta[3]);
  if (dim != domain.dim) throw InvalidArgument("grid csv: dimension does not match domain");
  next();  // column header
  std::vector<Vec2> pos(n, Vec2{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const auto f = next();
    if (f.size() != static_cast<std::size_t>(dim) + 1) {
      throw InvalidArgument("grid csv: bad point row");
    }
    const auto i = static_cast<std::size_t>(csv::parse_int(f[0]));
    if (i >= n) throw InvalidArgument("grid csv: point index out of range");
    for (int a = 0; a < dim; ++a) pos[i][a] = csv::parse_double(f[a + 1]);
  }
  return PointCloud(domain, std::move(pos), dx, h_max);
}

}  // namespace meshless
