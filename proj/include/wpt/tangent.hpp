#pragma once

#include <functional>

#include "wpt/geodesic.hpp"

namespace wpt {

// Vector field over a discrete measure: one tangent vector per atom, stored
// in ambient coordinates.
struct DiscreteField {
  DiscreteMeasure base;
  std::vector<Vec> values;
};

// Affine field x -> lin (x - mean) + cst over a Gaussian measure.
struct GaussianField {
  GaussianMeasure base;
  Mat lin;
  Vec cst;
};

using TangentField = std::variant<DiscreteField, GaussianField>;

// L2(mu) inner product: sum of w_i <u_i, v_i>, or E_mu <u(x), v(x)>.
double inner(const TangentField& u, const TangentField& v);
double field_norm(const TangentField& u);
TangentField field_axpy(double a, const TangentField& x, const TangentField& y);
TangentField field_scale(double a, const TangentField& x);

struct TangentDecomposition {
  TangentField tangent_part;
  TangentField normal_part;
};

// Orthogonal projection onto the tangent space T_mu. Discrete atoms in
// general position carry the full space (projection is the identity); on the
// Gaussian backend the symmetric part solves the Lyapunov equation
// S Sigma + Sigma S = lin Sigma + Sigma lin^T.
TangentDecomposition project_tangent(const TangentField& v);

// ParT: particle-wise Riemannian parallel transport along the geodesic.
TangentField part_field(const MongeGeodesic& g, double t1, double t2,
                        const TangentField& v);
// Push: pushforward by the Monge map. On discrete backends this is
// relabeling plus parallel transport of the residual; the exact differential
// is only available on the Gaussian backend.
TangentField push_field(const MongeGeodesic& g, double t1, double t2,
                        const TangentField& v);
// T = proj o ParT.
TangentField t_op(const MongeGeodesic& g, double t1, double t2,
                  const TangentField& v);

// Orthonormal coordinate chart on the field space of a measure. Coordinates
// carry the L2(mu) inner product to the Euclidean one, so operators between
// charts have honest singular values.
class FieldChart {
 public:
  static FieldChart discrete(const DiscreteMeasure& mu);
  static FieldChart gaussian(const GaussianMeasure& g);
  static FieldChart at(const MongeGeodesic& g, double t);

  int dim() const { return dim_; }
  Vec to_coords(const TangentField& f) const;
  TangentField from_coords(const Vec& c) const;

  // Orthonormal basis (columns) of the tangent subspace T_mu in coordinates.
  const Mat& tangent_basis() const { return tangent_basis_; }

 private:
  struct DiscreteData {
    DiscreteMeasure mu;
    std::vector<Mat> bases;  // per-atom orthonormal tangent bases
  };
  struct GaussianData {
    GaussianMeasure g;
    Mat sqrt_cov, inv_sqrt_cov;
  };
  std::variant<DiscreteData, GaussianData> data_;
  int dim_ = 0;
  Mat tangent_basis_;

  explicit FieldChart(DiscreteData d);
  explicit FieldChart(GaussianData d);
};

// Matrix of a field-to-field map in the given charts (columns = images of
// the source basis).
Mat op_matrix(const FieldChart& from, const FieldChart& to,
              const std::function<TangentField(const TangentField&)>& op);

Mat part_matrix(const MongeGeodesic& g, double t1, double t2);
Mat push_matrix(const MongeGeodesic& g, double t1, double t2);
Mat proj_matrix(const MongeGeodesic& g, double t);
Mat t_op_matrix(const MongeGeodesic& g, double t1, double t2);

// Largest singular value by power iteration on op^T op; deterministic under
// the fixed seed. 200 iterations or relative change below 1e-9.
double operator_norm(const Mat& op, unsigned long seed = 13);
// Norm of the restriction to the column span of basis.
double operator_norm_on(const Mat& op, const Mat& basis,
                        unsigned long seed = 13);

}  // namespace wpt
