#include "wpt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wpt {

TransportPlan oracle_1d_transport(const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu) {
  if (mu.manifold().kind() != ManifoldKind::Euclidean ||
      mu.manifold().dim() != 1 || nu.manifold().dim() != 1)
    throw ManifoldMismatch("1-D oracle requires Euclidean R^1 measures");
  std::vector<int> si(mu.size()), ti(nu.size());
  std::iota(si.begin(), si.end(), 0);
  std::iota(ti.begin(), ti.end(), 0);
  std::sort(si.begin(), si.end(), [&](int a, int b) {
    return mu.atom(a).x[0] < mu.atom(b).x[0];
  });
  std::sort(ti.begin(), ti.end(), [&](int a, int b) {
    return nu.atom(a).x[0] < nu.atom(b).x[0];
  });
  // sweep both quantile ladders, pairing overlapping mass
  std::vector<PlanEntry> entries;
  size_t a = 0, b = 0;
  double ra = mu.atom(si[0]).w, rb = nu.atom(ti[0]).w;
  while (a < si.size() && b < ti.size()) {
    const double m = std::min(ra, rb);
    if (m > 1e-15) entries.push_back({si[a], ti[b], m});
    ra -= m;
    rb -= m;
    if (ra <= 1e-15 && a + 1 < si.size()) ra = mu.atom(si[++a]).w;
    else if (ra <= 1e-15) ++a;
    if (rb <= 1e-15 && b + 1 < ti.size()) rb = nu.atom(ti[++b]).w;
    else if (rb <= 1e-15) ++b;
  }
  return TransportPlan(mu, nu, std::move(entries));
}

namespace {

// Lyapunov projection: symmetric S with S Sigma + Sigma S = X Sigma + Sigma X^T.
Mat lyap_proj(const Mat& sigma, const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  const Mat& q = es.eigenvectors();
  const Vec& lam = es.eigenvalues();
  const Mat b = x * sigma + sigma * x.transpose();
  Mat bt = q.transpose() * b * q;
  for (int i = 0; i < bt.rows(); ++i)
    for (int j = 0; j < bt.cols(); ++j) bt(i, j) /= lam[i] + lam[j];
  return q * bt * q.transpose();
}

}  // namespace

GaussianField oracle_gaussian_transport(const GaussianGeodesic& g, double a,
                                        double b, const GaussianField& v0,
                                        double step) {
  const int d = g.dim();
  const Mat bb = g.monge_linear() - Mat::Identity(d, d);
  auto deriv = [&](double t, const Mat& m) -> Mat {
    const Mat sigma = g.evaluate(t).cov();
    return -lyap_proj(sigma, m * bb * g.map_matrix(t).inverse());
  };
  // start from the tangent projection of v0 at a
  Mat m = lyap_proj(g.evaluate(a).cov(), v0.lin);
  const double span = b - a;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / step)));
  const double h = span / steps;
  double t = a;
  for (int k = 0; k < steps; ++k) {
    const Mat k1 = deriv(t, m);
    const Mat k2 = deriv(t + h / 2, m + (h / 2) * k1);
    const Mat k3 = deriv(t + h / 2, m + (h / 2) * k2);
    const Mat k4 = deriv(t + h, m + h * k3);
    m += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    t = a + span * static_cast<double>(k + 1) / steps;
  }
  return GaussianField{g.evaluate(b), m, v0.cst};
}

Mat oracle_gaussian_transport_matrix(const GaussianGeodesic& g, double a,
                                     double b, double step) {
  const FieldChart ca = FieldChart::gaussian(g.evaluate(a));
  const FieldChart cb = FieldChart::gaussian(g.evaluate(b));
  return op_matrix(ca, cb, [&](const TangentField& v) -> TangentField {
    return oracle_gaussian_transport(g, a, b, std::get<GaussianField>(v), step);
  });
}

}  // namespace wpt
