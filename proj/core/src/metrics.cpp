#include "densctl/metrics.hpp"

#include <cmath>

#include "densctl/error.hpp"

namespace densctl {

double l2_error(const GridFunction& a, const GridFunction& b) {
  require_same_mesh(a, b, "l2_error");
  if (a.components() != b.components()) throw InvalidArgument("l2_error: component mismatch");
  double s = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += (va[i] - vb[i]) * (va[i] - vb[i]);
  return std::sqrt(s * a.mesh().cell_volume());
}

double kl_divergence(const GridFunction& p, const GridFunction& q) {
  require_same_mesh(p, q, "kl_divergence");
  if (!p.is_scalar() || !q.is_scalar()) throw InvalidArgument("kl_divergence: scalar densities required");
  double s = 0.0;
  for (std::size_t i = 0; i < p.num_nodes(); ++i) {
    if (!(q[i] > 0)) throw InvalidArgument("kl_divergence: reference density has a nonpositive sample");
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s * p.mesh().cell_volume();
}

double percentage_error(double err, double reference) { return reference > 0 ? 100.0 * err / reference : 0.0; }

}  // namespace densctl
