#pragma once

#include <Eigen/Dense>

#include "wpt/errors.hpp"

namespace wpt {

using Point = Eigen::VectorXd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ManifoldKind { Euclidean, FlatTorus, Sphere };

// Base space N. Three constant-curvature backends: Euclidean R^d, flat torus
// with per-axis periods, and the round sphere S^2 of radius R embedded in R^3.
// Points are stored in ambient coordinates; sphere tangent vectors are ambient
// 3-vectors orthogonal to the base point.
class Manifold {
 public:
  static Manifold euclidean(int dim);
  static Manifold flat_torus(const Vec& period);
  static Manifold sphere(double radius = 1.0);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }          // intrinsic dimension
  int ambient_dim() const;                   // 3 for the sphere, dim otherwise
  double radius() const { return radius_; }
  const Vec& period() const { return period_; }
  double curvature_bound() const;

  bool contains(const Point& p, double tol = 1e-12) const;
  void require_point(const Point& p) const;  // throws InvalidPoint

  // Wraps torus coordinates into [0, period); identity elsewhere.
  Point canonical(const Point& p) const;

  double distance(const Point& p, const Point& q) const;
  Vec log(const Point& p, const Point& q) const;
  Point exp(const Point& p, const Vec& v) const;
  Point geodesic_point(const Point& p, const Point& q, double t) const;

  // Parallel transport of v (based at p) along the minimizing geodesic p->q.
  Vec transport(const Point& p, const Point& q, const Vec& v) const;

  // Orthonormal basis of the tangent space at p, ambient_dim x dim.
  Mat tangent_basis(const Point& p) const;

  bool operator==(const Manifold& o) const;

 private:
  Manifold(ManifoldKind kind, int dim, Vec period, double radius)
      : kind_(kind), dim_(dim), period_(std::move(period)), radius_(radius) {}

  ManifoldKind kind_;
  int dim_;
  Vec period_;    // torus only
  double radius_;  // sphere only

  void check_antipodal(const Point& p, const Point& q) const;
};

struct TangentVec {
  Point base;
  Vec components;  // ambient coordinates
};

}  // namespace wpt
