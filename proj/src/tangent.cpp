#include "wpt/tangent.hpp"

#include <cmath>
#include <random>

namespace wpt {

namespace {

const DiscreteField& as_discrete(const TangentField& f) {
  if (!std::holds_alternative<DiscreteField>(f))
    throw BaseMismatch("expected a discrete-backend field");
  return std::get<DiscreteField>(f);
}

const GaussianField& as_gaussian(const TangentField& f) {
  if (!std::holds_alternative<GaussianField>(f))
    throw BaseMismatch("expected a Gaussian-backend field");
  return std::get<GaussianField>(f);
}

void check_range(double t) {
  if (t < 0.0 || t > 1.0)
    throw ParameterOutOfRange("geodesic parameter outside [0,1]");
}

// Lyapunov solve S Sigma + Sigma S = B (B symmetric) by eigendecomposition.
Mat lyapunov_sym(const Mat& sigma, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  const Mat& q = es.eigenvectors();
  const Vec& lam = es.eigenvalues();
  Mat bt = q.transpose() * b * q;
  for (int i = 0; i < bt.rows(); ++i)
    for (int j = 0; j < bt.cols(); ++j) bt(i, j) /= lam[i] + lam[j];
  Mat s = q * bt * q.transpose();
  const double resid = (s * sigma + sigma * s - b).norm();
  if (resid > 1e-10 * std::max(1.0, b.norm()))
    throw SolverFailure("Lyapunov residual above tolerance");
  return s;
}

}  // namespace

double inner(const TangentField& u, const TangentField& v) {
  if (std::holds_alternative<DiscreteField>(u)) {
    const auto& a = as_discrete(u);
    const auto& b = as_discrete(v);
    if (a.base.size() != b.base.size())
      throw BaseMismatch("fields live over different measures");
    double s = 0;
    for (int i = 0; i < a.base.size(); ++i)
      s += a.base.atom(i).w * a.values[i].dot(b.values[i]);
    return s;
  }
  const auto& a = as_gaussian(u);
  const auto& b = as_gaussian(v);
  return (a.lin * b.base.cov()).cwiseProduct(b.lin).sum() + a.cst.dot(b.cst);
}

double field_norm(const TangentField& u) { return std::sqrt(inner(u, u)); }

TangentField field_axpy(double a, const TangentField& x,
                        const TangentField& y) {
  if (std::holds_alternative<DiscreteField>(x)) {
    DiscreteField r = as_discrete(y);
    const auto& xf = as_discrete(x);
    for (size_t i = 0; i < r.values.size(); ++i)
      r.values[i] += a * xf.values[i];
    return r;
  }
  GaussianField r = as_gaussian(y);
  const auto& xf = as_gaussian(x);
  r.lin += a * xf.lin;
  r.cst += a * xf.cst;
  return r;
}

TangentField field_scale(double a, const TangentField& x) {
  if (std::holds_alternative<DiscreteField>(x)) {
    DiscreteField r = as_discrete(x);
    for (auto& v : r.values) v *= a;
    return r;
  }
  GaussianField r = as_gaussian(x);
  r.lin *= a;
  r.cst *= a;
  return r;
}

TangentDecomposition project_tangent(const TangentField& v) {
  if (std::holds_alternative<DiscreteField>(v)) {
    // atoms in general position: T_mu is the whole space
    DiscreteField zero = as_discrete(v);
    for (auto& z : zero.values) z.setZero();
    return {v, TangentField(std::move(zero))};
  }
  const auto& f = as_gaussian(v);
  const Mat& sigma = f.base.cov();
  const Mat b = f.lin * sigma + sigma * f.lin.transpose();
  const Mat s = lyapunov_sym(sigma, b);
  GaussianField tan{f.base, s, f.cst};
  GaussianField nor{f.base, f.lin - s, Vec::Zero(f.cst.size())};
  return {TangentField(std::move(tan)), TangentField(std::move(nor))};
}

TangentField part_field(const MongeGeodesic& g, double t1, double t2,
                        const TangentField& v) {
  check_range(t1);
  check_range(t2);
  if (std::holds_alternative<DiscreteGeodesic>(g)) {
    const auto& gg = std::get<DiscreteGeodesic>(g);
    const auto& f = as_discrete(v);
    if (f.base.size() != gg.atom_count())
      throw BaseMismatch("field does not match geodesic support");
    DiscreteField out{gg.evaluate(t2), {}};
    out.values.reserve(f.values.size());
    for (int i = 0; i < gg.atom_count(); ++i)
      out.values.push_back(gg.transport_along(i, t1, t2, f.values[i]));
    return out;
  }
  const auto& gg = std::get<GaussianGeodesic>(g);
  const auto& f = as_gaussian(v);
  const Mat k = gg.map_matrix(t1) * gg.map_matrix(t2).inverse();
  return GaussianField{gg.evaluate(t2), f.lin * k, f.cst};
}

TangentField push_field(const MongeGeodesic& g, double t1, double t2,
                        const TangentField& v) {
  check_range(t1);
  check_range(t2);
  if (std::holds_alternative<DiscreteGeodesic>(g))
    return part_field(g, t1, t2, v);  // see module notes: exact for translations
  const auto& gg = std::get<GaussianGeodesic>(g);
  const auto& f = as_gaussian(v);
  const Mat s = gg.map_matrix(t2) * gg.map_matrix(t1).inverse();
  const Mat k = gg.map_matrix(t1) * gg.map_matrix(t2).inverse();
  return GaussianField{gg.evaluate(t2), s * f.lin * k, s * f.cst};
}

TangentField t_op(const MongeGeodesic& g, double t1, double t2,
                  const TangentField& v) {
  return project_tangent(part_field(g, t1, t2, v)).tangent_part;
}

FieldChart::FieldChart(DiscreteData d) : data_(std::move(d)) {
  const auto& dd = std::get<DiscreteData>(data_);
  dim_ = dd.mu.size() * dd.mu.manifold().dim();
  tangent_basis_ = Mat::Identity(dim_, dim_);
}

FieldChart::FieldChart(GaussianData d) : data_(std::move(d)) {
  const auto& gd = std::get<GaussianData>(data_);
  const int n = gd.g.dim();
  dim_ = n * n + n;
  // symmetric linear parts plus constants span T_mu; orthonormalize the
  // images of a symmetric basis in chart coordinates
  const int nsym = n * (n + 1) / 2;
  Mat cols = Mat::Zero(dim_, nsym + n);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = e(j, i) = 1.0;
      Mat img = e * gd.sqrt_cov;
      cols.col(c++).head(n * n) = Eigen::Map<Vec>(img.data(), n * n);
    }
  for (int i = 0; i < n; ++i) cols.col(nsym + i)[n * n + i] = 1.0;
  Eigen::HouseholderQR<Mat> qr(cols);
  tangent_basis_ =
      qr.householderQ() * Mat::Identity(dim_, static_cast<int>(cols.cols()));
}

FieldChart FieldChart::discrete(const DiscreteMeasure& mu) {
  DiscreteData d{mu, {}};
  d.bases.reserve(mu.size());
  for (int i = 0; i < mu.size(); ++i)
    d.bases.push_back(mu.manifold().tangent_basis(mu.atom(i).x));
  return FieldChart(std::move(d));
}

FieldChart FieldChart::gaussian(const GaussianMeasure& g) {
  return FieldChart(GaussianData{g, g.sqrt_cov(), g.inv_sqrt_cov()});
}

FieldChart FieldChart::at(const MongeGeodesic& g, double t) {
  if (std::holds_alternative<DiscreteGeodesic>(g))
    return discrete(std::get<DiscreteGeodesic>(g).evaluate(t));
  return gaussian(std::get<GaussianGeodesic>(g).evaluate(t));
}

Vec FieldChart::to_coords(const TangentField& f) const {
  if (std::holds_alternative<DiscreteData>(data_)) {
    const auto& dd = std::get<DiscreteData>(data_);
    const auto& df = as_discrete(f);
    if (df.base.size() != dd.mu.size())
      throw BaseMismatch("field does not match chart measure");
    const int k = dd.mu.manifold().dim();
    Vec c(dim_);
    for (int i = 0; i < dd.mu.size(); ++i)
      c.segment(i * k, k) = std::sqrt(dd.mu.atom(i).w) *
                            (dd.bases[i].transpose() * df.values[i]);
    return c;
  }
  const auto& gd = std::get<GaussianData>(data_);
  const auto& gf = as_gaussian(f);
  const int n = gd.g.dim();
  Mat img = gf.lin * gd.sqrt_cov;
  Vec c(dim_);
  c.head(n * n) = Eigen::Map<Vec>(img.data(), n * n);
  c.tail(n) = gf.cst;
  return c;
}

TangentField FieldChart::from_coords(const Vec& c) const {
  if (std::holds_alternative<DiscreteData>(data_)) {
    const auto& dd = std::get<DiscreteData>(data_);
    const int k = dd.mu.manifold().dim();
    DiscreteField f{dd.mu, {}};
    f.values.reserve(dd.mu.size());
    for (int i = 0; i < dd.mu.size(); ++i)
      f.values.push_back(dd.bases[i] * c.segment(i * k, k) /
                         std::sqrt(dd.mu.atom(i).w));
    return f;
  }
  const auto& gd = std::get<GaussianData>(data_);
  const int n = gd.g.dim();
  Mat img = Eigen::Map<const Mat>(c.head(n * n).data(), n, n);
  return GaussianField{gd.g, img * gd.inv_sqrt_cov, c.tail(n)};
}

Mat op_matrix(const FieldChart& from, const FieldChart& to,
              const std::function<TangentField(const TangentField&)>& op) {
  Mat m(to.dim(), from.dim());
  for (int j = 0; j < from.dim(); ++j)
    m.col(j) = to.to_coords(op(from.from_coords(Vec::Unit(from.dim(), j))));
  return m;
}

Mat part_matrix(const MongeGeodesic& g, double t1, double t2) {
  return op_matrix(FieldChart::at(g, t1), FieldChart::at(g, t2),
                   [&](const TangentField& v) { return part_field(g, t1, t2, v); });
}

Mat push_matrix(const MongeGeodesic& g, double t1, double t2) {
  return op_matrix(FieldChart::at(g, t1), FieldChart::at(g, t2),
                   [&](const TangentField& v) { return push_field(g, t1, t2, v); });
}

Mat proj_matrix(const MongeGeodesic& g, double t) {
  const FieldChart c = FieldChart::at(g, t);
  return op_matrix(c, c, [](const TangentField& v) {
    return project_tangent(v).tangent_part;
  });
}

Mat t_op_matrix(const MongeGeodesic& g, double t1, double t2) {
  return op_matrix(FieldChart::at(g, t1), FieldChart::at(g, t2),
                   [&](const TangentField& v) { return t_op(g, t1, t2, v); });
}

double operator_norm(const Mat& op, unsigned long seed) {
  if (op.size() == 0) return 0.0;
  const Mat gram = op.transpose() * op;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec x(gram.rows());
  for (int i = 0; i < x.size(); ++i) x[i] = nd(rng);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec y = gram * x;
    const double ny = y.norm();
    if (ny < 1e-300) return 0.0;
    y /= ny;
    const double next = y.dot(gram * y);
    const bool settled = std::abs(next - lambda) <= 1e-9 * std::max(1.0, next);
    lambda = next;
    x = y;
    if (settled && it > 2) break;
  }
  return std::sqrt(std::max(0.0, lambda));
}

double operator_norm_on(const Mat& op, const Mat& basis, unsigned long seed) {
  return operator_norm(op * basis, seed);
}

}  // namespace wpt
