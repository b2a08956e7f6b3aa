#pragma once

#include <vector>

#include "wpt/manifold.hpp"

namespace wpt {

struct Atom {
  Point x;
  double w;
};

// Finitely supported probability measure on a Manifold. Atoms must be
// pairwise distinct and weights must sum to 1; construction enforces both.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Manifold m, std::vector<Atom> atoms);

  // Skips the pairwise-distinctness check. Interpolants of short cone
  // segments can legitimately bring atoms arbitrarily close together.
  static DiscreteMeasure unchecked(Manifold m, std::vector<Atom> atoms);

  const Manifold& manifold() const { return manifold_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  const Atom& atom(int i) const { return atoms_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool uniform(double tol = 1e-12) const;

 private:
  DiscreteMeasure(Manifold m, std::vector<Atom> atoms, bool check);
  Manifold manifold_;
  std::vector<Atom> atoms_;
};

DiscreteMeasure dirac(const Manifold& m, const Point& p);

// Gaussian measure on the Euclidean backend; closed-form oracle family.
class GaussianMeasure {
 public:
  GaussianMeasure(Vec mean, Mat cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }
  Mat sqrt_cov() const;      // symmetric PSD square root
  Mat inv_sqrt_cov() const;

 private:
  Vec mean_;
  Mat cov_;
};

double gaussian_w2(const GaussianMeasure& a, const GaussianMeasure& b);

// i.i.d. sample of g atomized into a uniform discrete measure.
DiscreteMeasure atomize(const GaussianMeasure& g, int n, unsigned long seed);

}  // namespace wpt
