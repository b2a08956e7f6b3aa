#pragma once

#include "wpt/measure.hpp"

namespace wpt {

// Squared-distance cost matrix between the supports of two measures.
// The OpenMP variant writes each entry independently, so it is bit-identical
// to the serial reference; the reference is kept for tests and benchmarks.
Mat cost_matrix_serial(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
Mat cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Pairwise minimum distance among the columns of pts (ambient coordinates on
// the given manifold), used by the non-crossing diagnostic.
double min_pairwise_distance_serial(const Manifold& m,
                                    const std::vector<Point>& pts);
double min_pairwise_distance(const Manifold& m, const std::vector<Point>& pts);

}  // namespace wpt
