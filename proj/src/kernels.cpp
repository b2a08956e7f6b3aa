#include "wpt/kernels.hpp"

#include <limits>

namespace wpt {

Mat cost_matrix_serial(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const int ns = mu.size(), nt = nu.size();
  Mat c(ns, nt);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      const double d = mu.manifold().distance(mu.atom(i).x, nu.atom(j).x);
      c(i, j) = d * d;
    }
  return c;
}

Mat cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const int ns = mu.size(), nt = nu.size();
  Mat c(ns, nt);
#pragma omp parallel for schedule(static) if (static_cast<long>(ns) * nt > 4096)
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      const double d = mu.manifold().distance(mu.atom(i).x, nu.atom(j).x);
      c(i, j) = d * d;
    }
  return c;
}

double min_pairwise_distance_serial(const Manifold& m,
                                    const std::vector<Point>& pts) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, m.distance(pts[i], pts[j]));
  return best;
}

double min_pairwise_distance(const Manifold& m, const std::vector<Point>& pts) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(dynamic) reduction(min : best) \
    if (static_cast<long>(n) * n > 8192)
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, m.distance(pts[i], pts[j]));
  return best;
}

}  // namespace wpt
