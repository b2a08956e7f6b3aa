#pragma once

#include "wpt/tangent.hpp"

namespace wpt {

// Monotone rearrangement: the optimal quadratic-cost coupling on R.
// Independent of the assignment/flow solvers.
TransportPlan oracle_1d_transport(const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu);

// Comparison target for linear_parallel_transport on the Gaussian backend:
// RK4 integration of the tangent-projected transport equation
//   dM/dt = -P_t(M B T_t^{-1}),  dc/dt = 0,
// where B = A - I and P_t is the Lyapunov projection at Sigma_t.
GaussianField oracle_gaussian_transport(const GaussianGeodesic& g, double a,
                                        double b, const GaussianField& v0,
                                        double step = 1e-4);

// Matrix of the oracle in the charts at a and b.
Mat oracle_gaussian_transport_matrix(const GaussianGeodesic& g, double a,
                                     double b, double step = 1e-4);

}  // namespace wpt
