#include "meshless/errors.hpp"
#include "meshless/schemes.hpp"

namespace meshless {

CentralScheme::CentralScheme(const PointCloud& cloud, const SchemeSetup& setup, int degree)
    : degree_(degree), a_(setup.advection.velocity), inactive_(setup.inactive) {
  FitOptions opts;
  opts.degree = degree;
  opts.weight = setup.weight;
  opts.reduce_degree = setup.reduce_degree;
  opts.skip = setup.inactive;
  op_ = fit(cloud, cloud.neighbors(), opts);
}

void CentralScheme::evaluate(std::span<const double> u, std::span<double> dudt) const {
  const bool two_d = op_.dim() == 2;
  for (std::size_t i = 0; i < op_.size(); ++i) {
    if (!inactive_.empty() && inactive_[i]) {
      dudt[i] = 0.0;
      continue;
    }
    double r = -a_[0] * op_.apply(std::size_t{0}, i, u);
    if (two_d) r -= a_[1] * op_.apply(std::size_t{1}, i, u);
    dudt[i] = r;
  }
}

}  // namespace meshless
