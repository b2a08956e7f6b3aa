#include "wpt/manifold.hpp"

#include <cmath>

namespace wpt {

namespace {
constexpr double kAntipodalTol = 1e-9;
}

Manifold Manifold::euclidean(int dim) {
  if (dim <= 0) throw InvalidPoint("euclidean dimension must be positive");
  return Manifold(ManifoldKind::Euclidean, dim, Vec(), 0.0);
}

Manifold Manifold::flat_torus(const Vec& period) {
  if (period.size() == 0 || (period.array() <= 0).any())
    throw InvalidPoint("torus periods must be positive");
  return Manifold(ManifoldKind::FlatTorus, static_cast<int>(period.size()),
                  period, 0.0);
}

Manifold Manifold::sphere(double radius) {
  if (radius <= 0) throw InvalidPoint("sphere radius must be positive");
  return Manifold(ManifoldKind::Sphere, 2, Vec(), radius);
}

int Manifold::ambient_dim() const {
  return kind_ == ManifoldKind::Sphere ? 3 : dim_;
}

double Manifold::curvature_bound() const {
  return kind_ == ManifoldKind::Sphere ? 1.0 / (radius_ * radius_) : 0.0;
}

bool Manifold::contains(const Point& p, double tol) const {
  if (p.size() != ambient_dim()) return false;
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return p.allFinite();
    case ManifoldKind::FlatTorus:
      return p.allFinite() && (p.array() >= 0).all() &&
             (p.array() < period_.array()).all();
    case ManifoldKind::Sphere:
      return p.allFinite() && std::abs(p.norm() - radius_) <= tol * radius_;
  }
  return false;
}

void Manifold::require_point(const Point& p) const {
  if (!contains(p)) throw InvalidPoint("point not on manifold");
}

Point Manifold::canonical(const Point& p) const {
  if (kind_ != ManifoldKind::FlatTorus) return p;
  Point q = p;
  for (int i = 0; i < q.size(); ++i) {
    q[i] = std::fmod(q[i], period_[i]);
    if (q[i] < 0) q[i] += period_[i];
    if (q[i] >= period_[i]) q[i] = 0.0;  // fmod rounding at the seam
  }
  return q;
}

void Manifold::check_antipodal(const Point& p, const Point& q) const {
  const double c = p.dot(q) / (radius_ * radius_);
  if (c < -1.0 + kAntipodalTol)
    throw AntipodalPoints("antipodal sphere points have no unique geodesic");
}

double Manifold::distance(const Point& p, const Point& q) const {
  return log(p, q).norm();
}

Vec Manifold::log(const Point& p, const Point& q) const {
  require_point(p);
  require_point(q);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return q - p;
    case ManifoldKind::FlatTorus: {
      Vec d = q - p;
      // shortest representative per axis; ties broken toward the smaller
      // (negative) shift so the choice is deterministic
      for (int i = 0; i < d.size(); ++i) {
        const double per = period_[i];
        d[i] = std::remainder(d[i], per);
        if (std::abs(d[i] - per / 2) < 1e-12) d[i] = -per / 2;
      }
      return d;
    }
    case ManifoldKind::Sphere: {
      check_antipodal(p, q);
      const Point ph = p / radius_, qh = q / radius_;
      const double c = std::clamp(ph.dot(qh), -1.0, 1.0);
      // atan2 keeps full precision near theta = 0, where acos loses half
      // the significant digits
      const double s =
          Eigen::Vector3d(ph).cross(Eigen::Vector3d(qh)).norm();
      const double theta = std::atan2(s, c);
      if (theta < 1e-15) return Vec::Zero(3);
      Vec u = qh - c * ph;
      u.normalize();
      return radius_ * theta * u;
    }
  }
  return Vec();
}

Point Manifold::exp(const Point& p, const Vec& v) const {
  require_point(p);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return p + v;
    case ManifoldKind::FlatTorus:
      return canonical(p + v);
    case ManifoldKind::Sphere: {
      const double s = v.norm();
      if (s < 1e-300) return p;
      const double theta = s / radius_;
      const Vec u = v / s;
      return std::cos(theta) * p + std::sin(theta) * radius_ * u;
    }
  }
  return Point();
}

Point Manifold::geodesic_point(const Point& p, const Point& q, double t) const {
  return exp(p, t * log(p, q));
}

Vec Manifold::transport(const Point& p, const Point& q, const Vec& v) const {
  require_point(p);
  require_point(q);
  switch (kind_) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::FlatTorus:
      return v;
    case ManifoldKind::Sphere: {
      check_antipodal(p, q);
      const Vec l = log(p, q);
      const double s = l.norm();
      if (s < 1e-14) return v;
      const double theta = s / radius_;
      const Vec u = l / s;                 // unit tangent at p toward q
      const Vec ph = p / radius_;
      const double a = v.dot(u);
      const Vec w = v - a * u;             // orthogonal part is unchanged
      const Vec u_q = std::cos(theta) * u - std::sin(theta) * ph;
      return a * u_q + w;
    }
  }
  return Vec();
}

Mat Manifold::tangent_basis(const Point& p) const {
  if (kind_ != ManifoldKind::Sphere)
    return Mat::Identity(dim_, dim_);
  const Vec ph = p / radius_;
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(ph[i]) < std::abs(ph[k])) k = i;
  Vec e1 = Vec::Unit(3, k) - ph[k] * ph;
  e1.normalize();
  Vec e2(3);
  e2[0] = ph[1] * e1[2] - ph[2] * e1[1];
  e2[1] = ph[2] * e1[0] - ph[0] * e1[2];
  e2[2] = ph[0] * e1[1] - ph[1] * e1[0];
  Mat B(3, 2);
  B.col(0) = e1;
  B.col(1) = e2;
  return B;
}

bool Manifold::operator==(const Manifold& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_) return false;
  if (kind_ == ManifoldKind::FlatTorus) return period_ == o.period_;
  if (kind_ == ManifoldKind::Sphere) return radius_ == o.radius_;
  return true;
}

}  // namespace wpt
