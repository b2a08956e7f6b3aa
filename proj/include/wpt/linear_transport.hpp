#pragma once

#include "wpt/tangent.hpp"

namespace wpt {

// Strictly increasing points spanning the working interval.
struct Subdivision {
  std::vector<double> points;

  Subdivision(std::vector<double> pts);
  static Subdivision uniform(double a, double b, int segments);

  int segments() const { return static_cast<int>(points.size()) - 1; }
  double gap(int k) const { return points[k + 1] - points[k]; }
};

// Homogeneous operator family over a subdivision: neighbor operators are
// given, everything else is their ordered (left-accumulated) composition.
class OperatorFamily {
 public:
  OperatorFamily(Subdivision s, std::vector<Mat> neighbor_ops);

  const Subdivision& subdivision() const { return sub_; }
  const Mat& neighbor_op(int k) const { return ops_[k]; }
  Mat op(int i, int j) const;  // i < j

 private:
  Subdivision sub_;
  std::vector<Mat> ops_;
};

// Neighbor operators are T = proj o ParT.
OperatorFamily homogenize(const MongeGeodesic& g, const Subdivision& s);

using WidthFn = std::function<double(double)>;

// Default F(t) = C^2 W2^2(mu_0, mu_1) t^2 with C from estimate_c.
WidthFn default_width_fn(const MongeGeodesic& g);

// w^F = exp(sum F(gaps)) - 1.
double f_width(const Subdivision& s, const WidthFn& f);

struct FApproxReport {
  double max_discrepancy;
  double max_ratio;   // discrepancy / F(gap), over all pairs with F > 0
  int violations;     // pairs with discrepancy > F(gap) + 1e-9
};

FApproxReport check_f_approximation(const MongeGeodesic& g,
                                    const Subdivision& s, const WidthFn& f);

struct RefinementRow {
  int segments;
  double width;
  double successive_diff;
  double unitarity_defect;
  double wall_time;  // seconds, diagnostic only
};

struct LinearTransportResult {
  Mat op;  // chart(a) -> chart(b)
  std::vector<RefinementRow> trace;
};

// Dyadic refinement of uniform subdivisions of [a,b]. Homogenizations carry
// a first-order error in the segment count, so consecutive levels are
// Richardson-extrapolated; the iteration stops when successive extrapolated
// operators differ by less than tol in operator norm on T_mu_a.
// base_segments controls the refinement family (2,4,8,... by default).
LinearTransportResult linear_parallel_transport(const MongeGeodesic& g,
                                                double a, double b, double tol,
                                                int base_segments = 2,
                                                int budget = 4096);

// max over random tangent fields v of | ||op v|| - ||v|| | / ||v||.
double unitarity_defect(const Mat& op, const FieldChart& source, int trials,
                        unsigned long seed = 101);

}  // namespace wpt
