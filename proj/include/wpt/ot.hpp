#pragma once

#include <optional>

#include "wpt/measure.hpp"

namespace wpt {

struct PlanEntry {
  int i;        // source atom index
  int j;        // target atom index
  double mass;  // positive
};

// Coupling between two discrete measures. Marginals must match the atom
// weights; construction verifies this to 1e-10.
class TransportPlan {
 public:
  TransportPlan(DiscreteMeasure source, DiscreteMeasure target,
                std::vector<PlanEntry> entries);

  const DiscreteMeasure& source() const { return source_; }
  const DiscreteMeasure& target() const { return target_; }
  const std::vector<PlanEntry>& entries() const { return entries_; }

  double cost() const;  // sum of mass * d(x_i, y_j)^2

  // True when every source atom couples to exactly one target atom.
  bool deterministic() const;
  // Target index per source atom; only valid when deterministic().
  std::vector<int> map() const;

 private:
  DiscreteMeasure source_;
  DiscreteMeasure target_;
  std::vector<PlanEntry> entries_;
};

// Exact quadratic-cost optimal transport. Uniform equal-cardinality inputs go
// through an augmenting-path assignment solver; general weights through
// successive shortest paths on the bipartite flow network. Both are exact.
TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// McCann interpolation: every coupled mass element moves to parameter t of
// its geodesic. Requires the plan to pass verify_optimality.
DiscreteMeasure interpolate(const TransportPlan& plan, double t);
DiscreteMeasure interpolate_unchecked(const TransportPlan& plan, double t);

// Distance between two plans emanating from the same measure: the L2(mu)
// mixture of W2 between the normalized conditional measures at each source
// atom. Always at least w2 between the target measures.
double plan_distance(const TransportPlan& p1, const TransportPlan& p2);

// Cyclical-monotonicity spot check: exhaustive assignment comparison for
// uniform plans with <= 7 atoms, sampled 2-, 3- and 4-cycles otherwise.
bool verify_optimality(const TransportPlan& plan, int trials,
                       unsigned long seed = 7, double tol = 1e-9);

struct InteriorReport {
  double min_distance;  // min over sampled t of pairwise trajectory distance
  double argmin_t;
  bool violation;       // min_distance below 1e-9
};

// Minimum pairwise distance between distinct trajectories of a deterministic
// plan at sampled interior times.
InteriorReport check_interior(const TransportPlan& plan, int samples);

// Brute-force assignment over all permutations; oracle for n <= ~9.
double assignment_brute_force(const Mat& cost);

}  // namespace wpt
