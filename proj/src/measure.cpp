#include "wpt/measure.hpp"

#include <cmath>
#include <random>

namespace wpt {

DiscreteMeasure::DiscreteMeasure(Manifold m, std::vector<Atom> atoms, bool check)
    : manifold_(std::move(m)), atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InvalidPoint("measure needs at least one atom");
  double total = 0;
  for (auto& a : atoms_) {
    a.x = manifold_.canonical(a.x);
    manifold_.require_point(a.x);
    if (a.w <= 0) throw InfeasibleWeights("atom weights must be positive");
    total += a.w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InfeasibleWeights("atom weights must sum to 1");
  if (check) {
    for (size_t i = 0; i < atoms_.size(); ++i)
      for (size_t j = i + 1; j < atoms_.size(); ++j)
        if (manifold_.distance(atoms_[i].x, atoms_[j].x) <= 1e-9)
          throw InvalidPoint("coincident atoms rejected (not merged)");
  }
}

DiscreteMeasure::DiscreteMeasure(Manifold m, std::vector<Atom> atoms)
    : DiscreteMeasure(std::move(m), std::move(atoms), true) {}

DiscreteMeasure DiscreteMeasure::unchecked(Manifold m, std::vector<Atom> atoms) {
  return DiscreteMeasure(std::move(m), std::move(atoms), false);
}

bool DiscreteMeasure::uniform(double tol) const {
  const double w0 = 1.0 / size();
  for (const auto& a : atoms_)
    if (std::abs(a.w - w0) > tol) return false;
  return true;
}

DiscreteMeasure dirac(const Manifold& m, const Point& p) {
  return DiscreteMeasure(m, {{p, 1.0}});
}

GaussianMeasure::GaussianMeasure(Vec mean, Mat cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size())
    throw DimensionMismatch("gaussian mean/cov shape mismatch");
  if (!cov_.isApprox(cov_.transpose(), 1e-12))
    throw InvalidPoint("gaussian covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(cov_);
  if (es.eigenvalues().minCoeff() < 1e-10)
    throw InvalidPoint("gaussian covariance must have eigenvalues >= 1e-10");
}

Mat GaussianMeasure::sqrt_cov() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(cov_);
  return es.operatorSqrt();
}

Mat GaussianMeasure::inv_sqrt_cov() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(cov_);
  return es.operatorInverseSqrt();
}

double gaussian_w2(const GaussianMeasure& a, const GaussianMeasure& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("gaussian_w2 dimension mismatch");
  const Mat sa = a.sqrt_cov();
  Eigen::SelfAdjointEigenSolver<Mat> es(sa * b.cov() * sa);
  const Mat cross = es.operatorSqrt();
  double bures2 = a.cov().trace() + b.cov().trace() - 2.0 * cross.trace();
  if (bures2 < 0) bures2 = 0;  // roundoff near identical covariances
  return std::sqrt((a.mean() - b.mean()).squaredNorm() + bures2);
}

DiscreteMeasure atomize(const GaussianMeasure& g, int n, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const Mat s = g.sqrt_cov();
  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec z(g.dim());
    for (int k = 0; k < g.dim(); ++k) z[k] = nd(rng);
    atoms.push_back({g.mean() + s * z, 1.0 / n});
  }
  return DiscreteMeasure::unchecked(Manifold::euclidean(g.dim()),
                                    std::move(atoms));
}

}  // namespace wpt
