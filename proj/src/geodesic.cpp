#include "wpt/geodesic.hpp"

#include <cmath>

namespace wpt {

DiscreteGeodesic::DiscreteGeodesic(const TransportPlan& plan)
    : mu0_(plan.source()), length_(std::sqrt(plan.cost())) {
  if (!plan.deterministic())
    throw NonOptimalPlan("Monge geodesic requires a deterministic plan");
  if (!verify_optimality(plan, 256))
    throw NonOptimalPlan("Monge geodesic requires an optimal plan");
  const auto map = plan.map();
  targets_.reserve(map.size());
  for (size_t i = 0; i < map.size(); ++i)
    targets_.push_back(plan.target().atom(map[i]).x);
}

Point DiscreteGeodesic::trajectory(int i, double t) const {
  return manifold().geodesic_point(mu0_.atom(i).x, targets_[i], t);
}

Vec DiscreteGeodesic::velocity(int i, double t) const {
  const Vec v0 = manifold().log(mu0_.atom(i).x, targets_[i]);
  return manifold().transport(mu0_.atom(i).x, trajectory(i, t), v0);
}

DiscreteMeasure DiscreteGeodesic::evaluate(double t) const {
  std::vector<Atom> atoms;
  atoms.reserve(mu0_.size());
  for (int i = 0; i < mu0_.size(); ++i)
    atoms.push_back({trajectory(i, t), mu0_.atom(i).w});
  return DiscreteMeasure::unchecked(manifold(), std::move(atoms));
}

Vec DiscreteGeodesic::transport_along(int i, double t1, double t2,
                                      const Vec& v) const {
  return manifold().transport(trajectory(i, t1), trajectory(i, t2), v);
}

GaussianGeodesic::GaussianGeodesic(GaussianMeasure g0, GaussianMeasure g1)
    : g0_(std::move(g0)), g1_(std::move(g1)), length_(gaussian_w2(g0_, g1_)) {
  if (g0_.dim() != g1_.dim())
    throw DimensionMismatch("gaussian geodesic dimension mismatch");
  const Mat s = g0_.sqrt_cov();
  const Mat si = g0_.inv_sqrt_cov();
  Eigen::SelfAdjointEigenSolver<Mat> es(s * g1_.cov() * s);
  a_ = si * es.operatorSqrt() * si;
}

Mat GaussianGeodesic::map_matrix(double t) const {
  return (1.0 - t) * Mat::Identity(dim(), dim()) + t * a_;
}

Vec GaussianGeodesic::mean(double t) const {
  return (1.0 - t) * g0_.mean() + t * g1_.mean();
}

GaussianMeasure GaussianGeodesic::evaluate(double t) const {
  const Mat tt = map_matrix(t);
  return GaussianMeasure(mean(t), tt * g0_.cov() * tt);
}

double geodesic_length(const MongeGeodesic& g) {
  return std::visit([](const auto& gg) { return gg.length(); }, g);
}

namespace {

double lipschitz_discrete(const DiscreteGeodesic& g, int time_samples) {
  const int n = g.atom_count();
  if (n < 2) return 0.0;
  double best = 0.0;
  for (int s = 0; s < time_samples; ++s) {
    const double t = static_cast<double>(s) / (time_samples - 1);
    for (int i = 0; i < n; ++i) {
      const Point xi = g.trajectory(i, t);
      const Vec vi = g.velocity(i, t);
      for (int j = i + 1; j < n; ++j) {
        const Point xj = g.trajectory(j, t);
        const double d = g.manifold().distance(xi, xj);
        if (d < 1e-12) continue;
        // compare at x_i: bring v_j over by single-vector transport
        const Vec vj = g.manifold().transport(xj, xi, g.velocity(j, t));
        best = std::max(best, (vi - vj).norm() / d);
      }
    }
  }
  return best;
}

double lipschitz_gaussian(const GaussianGeodesic& g, int time_samples) {
  const Mat b = g.monge_linear() - Mat::Identity(g.dim(), g.dim());
  double best = 0.0;
  for (int s = 0; s < time_samples; ++s) {
    const double t = static_cast<double>(s) / (time_samples - 1);
    const Mat grad = b * g.map_matrix(t).inverse();
    best = std::max(best, grad.operatorNorm());
  }
  return best;
}

}  // namespace

double estimate_c(const MongeGeodesic& g, int time_samples) {
  if (std::holds_alternative<DiscreteGeodesic>(g))
    return lipschitz_discrete(std::get<DiscreteGeodesic>(g), time_samples);
  return lipschitz_gaussian(std::get<GaussianGeodesic>(g), time_samples);
}

}  // namespace wpt
