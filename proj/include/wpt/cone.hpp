#pragma once

#include <map>

#include "wpt/linear_transport.hpp"

namespace wpt {

// One geodesic ray of a cone direction: the src-th atom of the base measure
// heads toward `target`, carrying `mass`.
struct ConeLeg {
  int src;
  Point target;
  double mass;
};

// Tangent-cone element at a measure: a short transport plan of unit speed
// (W2 cost 1 when run to parameter 1) together with a radius. Radius-zero
// elements compare equal regardless of direction.
struct ConeElement {
  DiscreteMeasure base;
  std::vector<ConeLeg> legs;
  double radius = 1.0;

  double speed() const;  // sqrt(sum mass * d(x, target)^2)
};

// Decreasing epsilon values; the limsup surrogate takes the max over the
// last `kTailWindow` entries.
using EpsSchedule = std::vector<double>;
EpsSchedule default_eps_schedule();
inline constexpr int kTailWindow = 3;

// Rescales legs along their geodesics so the element has unit speed.
ConeElement make_unit_element(DiscreteMeasure base, std::vector<ConeLeg> legs,
                              double radius = 1.0);

// Measure at parameter s of the element's legs (McCann along each ray).
DiscreteMeasure element_point(const ConeElement& e, double s);

// Plan from the base to element_point(e, s).
TransportPlan element_plan(const ConeElement& e, double s);

// limsup surrogate of (1/eps) W2(gamma1(eps r1), gamma2(eps r2)).
double cone_distance(const ConeElement& e1, const ConeElement& e2,
                     const EpsSchedule& sched = default_eps_schedule());

struct ConeMapDiagnostics {
  double epsilon_used = 0;
  double p1_p2_distance = 0;  // plan distance between P1 and P2
  double d_ratio = 0;         // p1_p2_distance / epsilon
  double curvature_term = 0;  // curvature bound * (eps * r)^2
};

struct ConeMapResult {
  ConeElement element;
  ConeMapDiagnostics diag;
};

// The map M_{s,t}: shrink the element to a segment of length eps*r, parallel
// transport the segment plan along the Monge trajectories, re-optimize the
// transported plan, and rescale back to a unit direction. s > t runs the
// construction backward along the geodesic.
ConeMapResult cone_map(const DiscreteGeodesic& g, double s, double t,
                       const ConeElement& e, double eps);

// Random unit elements at mu: unit-norm displacement fields projected to
// verified-optimal short plans.
std::vector<ConeElement> sample_unit_elements(const DiscreteMeasure& mu,
                                              int count, unsigned long seed,
                                              double probe_scale = 1e-3);
std::vector<ConeElement> sample_unit_elements(const DiscreteGeodesic& g,
                                              double t, int count,
                                              unsigned long seed,
                                              double probe_scale = 1e-3);

// Finite-sample estimate (a lower bound) of D(t1, t2): the sup over unit
// elements of the tail-max of d_ratio over the schedule.
double d_estimate(const DiscreteGeodesic& g, double t1, double t2,
                  int sample_elements,
                  const EpsSchedule& sched = default_eps_schedule(),
                  unsigned long seed = 2024);

// Memoized D estimates over a fixed grid; dbar is the max over grid pairs
// inside a window. Per-pair seeds are derived from the pair indices, so the
// max over a sub-window never exceeds the max over the window.
class DbarCache {
 public:
  DbarCache(const DiscreteGeodesic& g, std::vector<double> grid,
            int sample_elements, EpsSchedule sched, unsigned long seed);

  const std::vector<double>& grid() const { return grid_; }
  double pair_value(int i, int j);
  double dbar(double t1, double t2);  // max over grid pairs within [t1,t2]

 private:
  const DiscreteGeodesic& g_;
  std::vector<double> grid_;
  int samples_;
  EpsSchedule sched_;
  unsigned long seed_;
  std::map<std::pair<int, int>, double> memo_;
};

double dbar(const DiscreteGeodesic& g, double t1, double t2,
            const std::vector<double>& grid, int sample_elements,
            const EpsSchedule& sched = default_eps_schedule(),
            unsigned long seed = 2024);

// cone_distance between the images of e under M_{t2,t3} o M_{t1,t2} and
// under M_{t1,t3}.
double composition_defect(const DiscreteGeodesic& g, double t1, double t2,
                          double t3, const ConeElement& e, double eps,
                          const EpsSchedule& sched = default_eps_schedule());

inline double total_potential_error(double c_hat, double w2_segment,
                                    double dbar_value) {
  return c_hat * w2_segment * dbar_value;
}

// Twice the sum of total potential errors over the segments of s; the
// subdivision points must lie on the cache grid.
double cone_width(const DiscreteGeodesic& g, const Subdivision& s,
                  double c_hat, DbarCache& cache);

// Ordered composition of cone_map over consecutive points (a->b direction,
// descending points allowed).
ConeElement composite_cone_transport(const DiscreteGeodesic& g,
                                     const std::vector<double>& points,
                                     const ConeElement& e, double eps);

struct ConeTraceRow {
  int segments;
  double width;            // certified bound from per-segment D estimates
  double successive_diff;  // cone_distance between consecutive composites
  double wall_time;        // seconds, diagnostic only
};

struct ConeTransportResult {
  ConeElement element;
  std::vector<ConeTraceRow> trace;
  double certified_width = 0;
  bool assumption_flagged = false;  // well-definedness probe failed
};

struct ConeLimitConfig {
  double tol = 1e-4;
  EpsSchedule sched = default_eps_schedule();
  int budget = 1024;          // max segments
  int width_samples = 4;      // elements per D estimate in the width bound
  double c_hat = -1;          // < 0 means use estimate_c
  unsigned long seed = 2024;
};

// Dyadic refinement of the composite transport until successive images are
// within tol in cone_distance.
ConeTransportResult transport_limit(const DiscreteGeodesic& g, double a,
                                    double b, const ConeElement& e,
                                    const ConeLimitConfig& cfg = {});

struct RoundtripResult {
  double defect;
  double forward_width;
  double backward_width;
};

RoundtripResult roundtrip_defect(const DiscreteGeodesic& g, double a, double b,
                                 const ConeElement& e,
                                 const ConeLimitConfig& cfg = {});

struct NonexpansiveReport {
  int pairs = 0;
  int violations = 0;
  double max_violation = 0;  // max positive (d_after - d_before - tol)
  double max_expansion = 0;  // max raw d_after - d_before
};

NonexpansiveReport nonexpansive_check(
    const DiscreteGeodesic& g, double s, double t,
    const std::vector<std::pair<ConeElement, ConeElement>>& pairs,
    const EpsSchedule& sched = default_eps_schedule());

}  // namespace wpt
