#pragma once

#include <variant>

#include "wpt/ot.hpp"

namespace wpt {

// Wasserstein geodesic with a deterministic (Monge) plan on a discrete
// measure: one trajectory per atom, parametrized proportionally to length
// on [0,1].
class DiscreteGeodesic {
 public:
  explicit DiscreteGeodesic(const TransportPlan& plan);

  const Manifold& manifold() const { return mu0_.manifold(); }
  int atom_count() const { return mu0_.size(); }
  double length() const { return length_; }  // W2(mu_0, mu_1)
  const DiscreteMeasure& start() const { return mu0_; }

  Point trajectory(int i, double t) const;
  Vec velocity(int i, double t) const;
  DiscreteMeasure evaluate(double t) const;

  // Parallel transport of v along atom i's trajectory from t1 to t2.
  Vec transport_along(int i, double t1, double t2, const Vec& v) const;

 private:
  DiscreteMeasure mu0_;
  std::vector<Point> targets_;
  double length_;
};

// Bures-Wasserstein geodesic between Gaussians on R^d. The Monge map is
// x -> m1 + A (x - m0) with A symmetric positive definite.
class GaussianGeodesic {
 public:
  GaussianGeodesic(GaussianMeasure g0, GaussianMeasure g1);

  int dim() const { return g0_.dim(); }
  double length() const { return length_; }
  const GaussianMeasure& start() const { return g0_; }
  const GaussianMeasure& end() const { return g1_; }
  const Mat& monge_linear() const { return a_; }

  Mat map_matrix(double t) const;  // T_t = (1-t) I + t A
  Vec mean(double t) const;
  GaussianMeasure evaluate(double t) const;

 private:
  GaussianMeasure g0_, g1_;
  Mat a_;
  double length_;
};

using MongeGeodesic = std::variant<DiscreteGeodesic, GaussianGeodesic>;

double geodesic_length(const MongeGeodesic& g);

inline double w2_gap(const MongeGeodesic& g, double t1, double t2) {
  return std::abs(t2 - t1) * geodesic_length(g);
}

// Numerical upper bound for the constant C of the Push-vs-ParT estimate,
// from the spatial Lipschitz constant of the velocity field. Exact spatial
// derivative on the Gaussian backend; finite differences over atom pairs on
// the discrete backend (declared heuristic there).
double estimate_c(const MongeGeodesic& g, int time_samples = 11);

}  // namespace wpt
