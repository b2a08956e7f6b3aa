#include "wpt/cone.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace wpt {

namespace {

double tail_max(const std::vector<double>& vals) {
  if (vals.empty()) return 0;
  const int k = std::min<int>(kTailWindow, static_cast<int>(vals.size()));
  double m = 0;
  for (int i = static_cast<int>(vals.size()) - k;
       i < static_cast<int>(vals.size()); ++i)
    m = std::max(m, vals[i]);
  return m;
}

// spread of the tail window; used as the schedule tolerance in probes
double tail_spread(const std::vector<double>& vals) {
  if (vals.empty()) return 0;
  const int k = std::min<int>(kTailWindow, static_cast<int>(vals.size()));
  double lo = vals.back(), hi = vals.back();
  for (int i = static_cast<int>(vals.size()) - k;
       i < static_cast<int>(vals.size()); ++i) {
    lo = std::min(lo, vals[i]);
    hi = std::max(hi, vals[i]);
  }
  return hi - lo;
}

void check_same_base(const ConeElement& e1, const ConeElement& e2) {
  if (e1.base.size() != e2.base.size() ||
      !(e1.base.manifold() == e2.base.manifold()))
    throw BaseMismatch("cone elements live at different measures");
  for (int i = 0; i < e1.base.size(); ++i)
    if (e1.base.manifold().distance(e1.base.atom(i).x, e2.base.atom(i).x) >
        1e-8)
      throw BaseMismatch("cone elements live at different measures");
}

void check_element_at(const DiscreteGeodesic& g, double t,
                      const ConeElement& e) {
  if (e.base.size() != g.atom_count())
    throw BaseMismatch("element base does not match the geodesic");
  for (int i = 0; i < e.base.size(); ++i)
    if (g.manifold().distance(e.base.atom(i).x, g.trajectory(i, t)) > 1e-8)
      throw BaseMismatch("element base does not match mu_t");
}

}  // namespace

double ConeElement::speed() const {
  double s = 0;
  for (const auto& l : legs) {
    const double d = base.manifold().distance(base.atom(l.src).x, l.target);
    s += l.mass * d * d;
  }
  return std::sqrt(s);
}

EpsSchedule default_eps_schedule() {
  EpsSchedule s;
  for (int k = 3; k <= 10; ++k) s.push_back(std::pow(2.0, -k));
  return s;
}

ConeElement make_unit_element(DiscreteMeasure base, std::vector<ConeLeg> legs,
                              double radius) {
  ConeElement e{std::move(base), std::move(legs), radius};
  const double sp = e.speed();
  if (sp < 1e-14) {
    e.radius = 0;
    return e;
  }
  const auto& m = e.base.manifold();
  for (auto& l : e.legs) {
    const Point& x = e.base.atom(l.src).x;
    l.target = m.exp(x, m.log(x, l.target) / sp);
  }
  return e;
}

DiscreteMeasure element_point(const ConeElement& e, double s) {
  const auto& m = e.base.manifold();
  std::vector<Atom> atoms;
  if (e.radius == 0 || e.legs.empty()) {
    for (const auto& a : e.base.atoms()) atoms.push_back(a);
    return DiscreteMeasure::unchecked(m, std::move(atoms));
  }
  for (const auto& l : e.legs) {
    const Point& x = e.base.atom(l.src).x;
    const Point p = m.exp(x, s * m.log(x, l.target));
    bool merged = false;
    for (auto& a : atoms)
      if ((a.x - p).norm() < 1e-12) {
        a.w += l.mass;
        merged = true;
        break;
      }
    if (!merged) atoms.push_back({p, l.mass});
  }
  return DiscreteMeasure::unchecked(m, std::move(atoms));
}

TransportPlan element_plan(const ConeElement& e, double s) {
  const auto& m = e.base.manifold();
  std::vector<Atom> atoms;
  std::vector<PlanEntry> entries;
  for (const auto& l : e.legs) {
    const Point& x = e.base.atom(l.src).x;
    const Point p = e.radius == 0 ? x : m.exp(x, s * m.log(x, l.target));
    int j = -1;
    for (size_t k = 0; k < atoms.size(); ++k)
      if ((atoms[k].x - p).norm() < 1e-12) {
        j = static_cast<int>(k);
        break;
      }
    if (j < 0) {
      atoms.push_back({p, l.mass});
      j = static_cast<int>(atoms.size()) - 1;
    } else {
      atoms[j].w += l.mass;
    }
    entries.push_back({l.src, j, l.mass});
  }
  return TransportPlan(e.base,
                       DiscreteMeasure::unchecked(m, std::move(atoms)),
                       std::move(entries));
}

double cone_distance(const ConeElement& e1, const ConeElement& e2,
                     const EpsSchedule& sched) {
  check_same_base(e1, e2);
  std::vector<double> vals;
  vals.reserve(sched.size());
  for (double eps : sched)
    vals.push_back(
        w2(element_point(e1, eps * e1.radius), element_point(e2, eps * e2.radius)) /
        eps);
  return tail_max(vals);
}

ConeMapResult cone_map(const DiscreteGeodesic& g, double s, double t,
                       const ConeElement& e, double eps) {
  if (s <= 0 || s >= 1 || t <= 0 || t >= 1)
    throw NotInterior("cone_map parameters must be interior to the geodesic");
  check_element_at(g, s, e);
  const auto& m = g.manifold();

  ConeMapDiagnostics diag;
  diag.epsilon_used = eps;

  const DiscreteMeasure mu_t = g.evaluate(t);
  if (e.radius == 0) {
    std::vector<ConeLeg> legs;
    for (int i = 0; i < mu_t.size(); ++i)
      legs.push_back({i, mu_t.atom(i).x, mu_t.atom(i).w});
    return {ConeElement{mu_t, std::move(legs), 0.0}, diag};
  }

  const double seg = eps * e.radius;
  diag.curvature_term = m.curvature_bound() * seg * seg;

  // the eps*r segment of the element must still be an optimal plan
  if (!verify_optimality(element_plan(e, seg), 128))
    throw SegmentNotOptimal("shrunk element plan failed optimality check");

  // transport each leg's displacement along the Monge trajectories
  std::vector<Atom> nu_atoms;
  std::vector<PlanEntry> p1_entries;
  for (const auto& l : e.legs) {
    const Point& x_s = e.base.atom(l.src).x;
    const Vec disp = seg * m.log(x_s, l.target);
    const Vec moved = g.transport_along(l.src, s, t, disp);
    const Point y = m.exp(g.trajectory(l.src, t), moved);
    int j = -1;
    for (size_t k = 0; k < nu_atoms.size(); ++k)
      if ((nu_atoms[k].x - y).norm() < 1e-12) {
        j = static_cast<int>(k);
        break;
      }
    if (j < 0) {
      nu_atoms.push_back({y, l.mass});
      j = static_cast<int>(nu_atoms.size()) - 1;
    } else {
      nu_atoms[j].w += l.mass;
    }
    p1_entries.push_back({l.src, j, l.mass});
  }
  const DiscreteMeasure nu_t =
      DiscreteMeasure::unchecked(m, std::move(nu_atoms));
  const TransportPlan p1(mu_t, nu_t, std::move(p1_entries));
  const TransportPlan p2 = solve_ot(mu_t, nu_t);

  diag.p1_p2_distance = plan_distance(p1, p2);
  diag.d_ratio = diag.p1_p2_distance / eps;

  const double w = std::sqrt(p2.cost());
  const double r_new = w / eps;
  if (r_new < 1e-12) {
    std::vector<ConeLeg> legs;
    for (int i = 0; i < mu_t.size(); ++i)
      legs.push_back({i, mu_t.atom(i).x, mu_t.atom(i).w});
    return {ConeElement{mu_t, std::move(legs), 0.0}, diag};
  }

  std::vector<ConeLeg> legs;
  legs.reserve(p2.entries().size());
  for (const auto& en : p2.entries()) {
    const Point& x = mu_t.atom(en.i).x;
    const Point target = m.exp(x, m.log(x, nu_t.atom(en.j).x) / w);
    legs.push_back({en.i, target, en.mass});
  }
  return {ConeElement{mu_t, std::move(legs), r_new}, diag};
}

std::vector<ConeElement> sample_unit_elements(const DiscreteGeodesic& g,
                                              double t, int count,
                                              unsigned long seed,
                                              double probe_scale) {
  return sample_unit_elements(g.evaluate(t), count, seed, probe_scale);
}

std::vector<ConeElement> sample_unit_elements(const DiscreteMeasure& mu,
                                              int count, unsigned long seed,
                                              double probe_scale) {
  const auto& m = mu.manifold();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<ConeElement> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    // random tangent displacement field, normalized in L2(mu)
    std::vector<Vec> disp(mu.size());
    double norm2 = 0;
    for (int i = 0; i < mu.size(); ++i) {
      const Mat b = m.tangent_basis(mu.atom(i).x);
      Vec r(b.cols());
      for (int k = 0; k < r.size(); ++k) r[k] = nd(rng);
      disp[i] = b * r;
      norm2 += mu.atom(i).w * disp[i].squaredNorm();
    }
    const double scale = probe_scale / std::sqrt(norm2);
    std::vector<Atom> atoms;
    for (int i = 0; i < mu.size(); ++i)
      atoms.push_back({m.exp(mu.atom(i).x, scale * disp[i]), mu.atom(i).w});
    const DiscreteMeasure nu = DiscreteMeasure::unchecked(m, std::move(atoms));
    const TransportPlan plan = solve_ot(mu, nu);
    const double speed = std::sqrt(plan.cost());
    if (speed < 1e-14) continue;
    std::vector<ConeLeg> legs;
    for (const auto& en : plan.entries()) {
      const Point& x = mu.atom(en.i).x;
      legs.push_back(
          {en.i, m.exp(x, m.log(x, nu.atom(en.j).x) / speed), en.mass});
    }
    out.push_back(ConeElement{mu, std::move(legs), 1.0});
  }
  return out;
}

double d_estimate(const DiscreteGeodesic& g, double t1, double t2,
                  int sample_elements, const EpsSchedule& sched,
                  unsigned long seed) {
  if (t1 == t2) return 0;
  const auto elements = sample_unit_elements(g, t1, sample_elements, seed);
  double worst = 0;
  const size_t tail_start =
      sched.size() > kTailWindow ? sched.size() - kTailWindow : 0;
  for (const auto& e : elements) {
    std::vector<double> ratios;
    ratios.reserve(sched.size());
    for (size_t k = 0; k < sched.size(); ++k) {
      try {
        ratios.push_back(cone_map(g, t1, t2, e, sched[k]).diag.d_ratio);
      } catch (const SegmentNotOptimal&) {
        // the sampled direction is only a geodesic plan up to some scale;
        // coarse eps above that scale contribute nothing to the limsup
        if (k >= tail_start) throw;
      }
    }
    worst = std::max(worst, tail_max(ratios));
  }
  return worst;
}

DbarCache::DbarCache(const DiscreteGeodesic& g, std::vector<double> grid,
                     int sample_elements, EpsSchedule sched,
                     unsigned long seed)
    : g_(g),
      grid_(std::move(grid)),
      samples_(sample_elements),
      sched_(std::move(sched)),
      seed_(seed) {}

double DbarCache::pair_value(int i, int j) {
  const auto key = std::make_pair(i, j);
  const auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  const unsigned long pair_seed =
      seed_ + 1000003UL * static_cast<unsigned long>(i) +
      static_cast<unsigned long>(j);
  const double v = d_estimate(g_, grid_[i], grid_[j], samples_, sched_, pair_seed);
  memo_[key] = v;
  return v;
}

double DbarCache::dbar(double t1, double t2) {
  const double lo = std::min(t1, t2) - 1e-12, hi = std::max(t1, t2) + 1e-12;
  double worst = 0;
  for (size_t i = 0; i < grid_.size(); ++i) {
    if (grid_[i] < lo || grid_[i] > hi) continue;
    for (size_t j = i + 1; j < grid_.size(); ++j) {
      if (grid_[j] > hi) break;
      worst = std::max(worst,
                       pair_value(static_cast<int>(i), static_cast<int>(j)));
    }
  }
  return worst;
}

double dbar(const DiscreteGeodesic& g, double t1, double t2,
            const std::vector<double>& grid, int sample_elements,
            const EpsSchedule& sched, unsigned long seed) {
  DbarCache cache(g, grid, sample_elements, sched, seed);
  return cache.dbar(t1, t2);
}

double composition_defect(const DiscreteGeodesic& g, double t1, double t2,
                          double t3, const ConeElement& e, double eps,
                          const EpsSchedule& sched) {
  const ConeElement direct = cone_map(g, t1, t3, e, eps).element;
  const ConeElement step1 = cone_map(g, t1, t2, e, eps).element;
  const ConeElement step2 = cone_map(g, t2, t3, step1, eps).element;
  return cone_distance(direct, step2, sched);
}

double cone_width(const DiscreteGeodesic& g, const Subdivision& s,
                  double c_hat, DbarCache& cache) {
  double sum = 0;
  for (int k = 0; k < s.segments(); ++k) {
    const double w_seg = std::abs(s.gap(k)) * g.length();
    sum += total_potential_error(c_hat, w_seg, cache.dbar(s.points[k], s.points[k + 1]));
  }
  return 2.0 * sum;
}

ConeElement composite_cone_transport(const DiscreteGeodesic& g,
                                     const std::vector<double>& points,
                                     const ConeElement& e, double eps) {
  if (points.size() < 2)
    throw ParameterOutOfRange("composite transport needs >= 2 points");
  ConeElement cur = e;
  for (size_t k = 0; k + 1 < points.size(); ++k)
    cur = cone_map(g, points[k], points[k + 1], cur, eps).element;
  return cur;
}

namespace {

std::vector<double> linspace(double a, double b, int segments) {
  std::vector<double> pts(segments + 1);
  for (int k = 0; k <= segments; ++k)
    pts[k] = a + (b - a) * static_cast<double>(k) / segments;
  return pts;
}

}  // namespace

ConeTransportResult transport_limit(const DiscreteGeodesic& g, double a,
                                    double b, const ConeElement& e,
                                    const ConeLimitConfig& cfg) {
  ConeTransportResult res{e, {}, 0.0, false};
  if (a == b) return res;
  const double eps = cfg.sched.back();
  const double eps_prev =
      cfg.sched.size() > 1 ? cfg.sched[cfg.sched.size() - 2] : eps;
  const double c_hat = cfg.c_hat >= 0 ? cfg.c_hat : estimate_c(MongeGeodesic(g));

  // well-definedness probe: consecutive schedule epsilons
  // must yield nearby images across a single segment
  {
    const ConeElement im1 = cone_map(g, a, b, e, eps).element;
    const ConeElement im2 = cone_map(g, a, b, e, eps_prev).element;
    if (cone_distance(im1, im2, cfg.sched) > 50 * cfg.tol)
      res.assumption_flagged = true;
  }

  bool has_prev = false;
  ConeElement cur = e;
  for (int n = 2; n <= cfg.budget; n *= 2) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pts = linspace(a, b, n);
    ConeElement img = composite_cone_transport(g, pts, e, eps);
    ConeTraceRow row{n, 0.0, -1.0, 0.0};
    {
      const double lo = std::min(a, b), hi = std::max(a, b);
      std::vector<double> grid = linspace(lo, hi, n);
      DbarCache cache(g, grid, cfg.width_samples, cfg.sched, cfg.seed);
      // per-segment endpoint pairs only: D of each segment, summed
      double sum = 0;
      for (int k = 0; k < n; ++k)
        sum += total_potential_error(
            c_hat, (hi - lo) / n * g.length(),
            cache.pair_value(k, k + 1));
      row.width = 2.0 * sum;
    }
    if (has_prev) row.successive_diff = cone_distance(cur, img, cfg.sched);
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.trace.push_back(row);
    const bool done = has_prev && row.successive_diff < cfg.tol;
    cur = std::move(img);
    has_prev = true;
    if (done) {
      res.element = cur;
      res.certified_width = row.width;
      return res;
    }
  }
  throw NoConvergence(
      "cone transport failed to converge within budget (possible evidence "
      "against the zero-width assumption for this instance)");
}

RoundtripResult roundtrip_defect(const DiscreteGeodesic& g, double a, double b,
                                 const ConeElement& e,
                                 const ConeLimitConfig& cfg) {
  if (a == b) return {0.0, 0.0, 0.0};
  const auto fwd = transport_limit(g, a, b, e, cfg);
  const auto bwd = transport_limit(g, b, a, fwd.element, cfg);
  return {cone_distance(e, bwd.element, cfg.sched), fwd.certified_width,
          bwd.certified_width};
}

NonexpansiveReport nonexpansive_check(
    const DiscreteGeodesic& g, double s, double t,
    const std::vector<std::pair<ConeElement, ConeElement>>& pairs,
    const EpsSchedule& sched) {
  NonexpansiveReport rep;
  const double eps = sched.back();
  for (const auto& [e1, e2] : pairs) {
    ++rep.pairs;
    std::vector<double> before, after;
    const ConeElement m1 = cone_map(g, s, t, e1, eps).element;
    const ConeElement m2 = cone_map(g, s, t, e2, eps).element;
    for (double ee : sched) {
      before.push_back(
          w2(element_point(e1, ee * e1.radius), element_point(e2, ee * e2.radius)) / ee);
      after.push_back(
          w2(element_point(m1, ee * m1.radius), element_point(m2, ee * m2.radius)) / ee);
    }
    const double d_before = tail_max(before);
    const double d_after = tail_max(after);
    const double tol = tail_spread(before) + tail_spread(after) + 1e-9;
    const double diff = d_after - d_before;
    rep.max_expansion = std::max(rep.max_expansion, diff);
    if (diff > tol) {
      ++rep.violations;
      rep.max_violation = std::max(rep.max_violation, diff - tol);
    }
  }
  return rep;
}

}  // namespace wpt
