#include "wpt/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "wpt/kernels.hpp"

namespace wpt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest augmenting path assignment (Jonker-Volgenant style potentials).
// Rows must not exceed columns. Returns the assigned column per row.
std::vector<int> solve_assignment(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Successive shortest paths with potentials on the complete bipartite graph;
// real-valued flow, exact for general weights. One active source at a time;
// after each augmentation potentials are raised by the capped Dijkstra
// distances, which keeps every residual arc at non-negative reduced cost, so
// the final flow satisfies complementary slackness and is optimal.
std::vector<PlanEntry> solve_mcf(const Mat& cost, const std::vector<double>& a,
                                 const std::vector<double>& b) {
  constexpr double kMassEps = 1e-14;
  const int ns = static_cast<int>(a.size());
  const int nt = static_cast<int>(b.size());
  std::vector<double> rem_a = a, rem_b = b;
  Mat flow = Mat::Zero(ns, nt);
  // duals with rc(i,j) = cost(i,j) - u_i - v_j >= 0 throughout
  std::vector<double> pu(ns, 0.0), pv(nt, 0.0);
  for (int j = 0; j < nt; ++j) pv[j] = cost.col(j).minCoeff();

  const int total_nodes = ns + nt;
  std::vector<double> dist(total_nodes);
  std::vector<int> prev(total_nodes);
  std::vector<char> done(total_nodes);
  long iterations = 0;
  const long max_iterations = 64L * total_nodes + 4096;

  for (int src = 0; src < ns; ++src) {
    while (rem_a[src] > kMassEps) {
      if (++iterations > max_iterations)
        throw SolverFailure("min-cost flow: augmentation cap exceeded");
      // Dijkstra from src over the residual graph in reduced costs
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev.begin(), prev.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      dist[src] = 0.0;
      for (int it = 0; it < total_nodes; ++it) {
        int u = -1;
        for (int k = 0; k < total_nodes; ++k)
          if (!done[k] && dist[k] < kInf && (u < 0 || dist[k] < dist[u]))
            u = k;
        if (u < 0) break;
        done[u] = 1;
        if (u < ns) {
          for (int j = 0; j < nt; ++j) {
            const double rc =
                std::max(0.0, cost(u, j) - pu[u] - pv[j]);
            if (dist[u] + rc < dist[ns + j]) {
              dist[ns + j] = dist[u] + rc;
              prev[ns + j] = u;
            }
          }
        } else {
          const int j = u - ns;
          for (int i = 0; i < ns; ++i) {
            if (flow(i, j) <= kMassEps) continue;  // residual backward arc
            const double rc =
                std::max(0.0, -(cost(i, j) - pu[i] - pv[j]));
            if (dist[u] + rc < dist[i]) {
              dist[i] = dist[u] + rc;
              prev[i] = u;
            }
          }
        }
      }
      // nearest sink with remaining demand
      int best_j = -1;
      for (int j = 0; j < nt; ++j)
        if (rem_b[j] > kMassEps && dist[ns + j] < kInf &&
            (best_j < 0 || dist[ns + j] < dist[ns + best_j]))
          best_j = j;
      if (best_j < 0) throw SolverFailure("min-cost flow: no augmenting path");
      const double cap = dist[ns + best_j];
      // bottleneck along the path
      double push = std::min(rem_a[src], rem_b[best_j]);
      for (int u = ns + best_j; prev[u] >= 0; u = prev[u])
        if (u < ns) push = std::min(push, flow(u, prev[u] - ns));
      for (int u = ns + best_j; prev[u] >= 0; u = prev[u]) {
        const int p = prev[u];
        if (u >= ns) {
          flow(p, u - ns) += push;
        } else {
          flow(u, p - ns) -= push;
          if (flow(u, p - ns) < kMassEps) flow(u, p - ns) = 0.0;
        }
      }
      rem_a[src] -= push;
      rem_b[best_j] -= push;
      if (rem_a[src] < kMassEps) rem_a[src] = 0.0;
      if (rem_b[best_j] < kMassEps) rem_b[best_j] = 0.0;
      for (int i = 0; i < ns; ++i) pu[i] -= std::min(dist[i], cap);
      for (int j = 0; j < nt; ++j) pv[j] += std::min(dist[ns + j], cap);
    }
  }
  std::vector<PlanEntry> entries;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j)
      if (flow(i, j) > kMassEps) entries.push_back({i, j, flow(i, j)});
  return entries;
}

}  // namespace

TransportPlan::TransportPlan(DiscreteMeasure source, DiscreteMeasure target,
                             std::vector<PlanEntry> entries)
    : source_(std::move(source)),
      target_(std::move(target)),
      entries_(std::move(entries)) {
  std::vector<double> row(source_.size(), 0.0), col(target_.size(), 0.0);
  for (const auto& e : entries_) {
    if (e.i < 0 || e.i >= source_.size() || e.j < 0 || e.j >= target_.size())
      throw InvalidPoint("plan entry index out of range");
    if (e.mass <= 0) throw InfeasibleWeights("plan masses must be positive");
    row[e.i] += e.mass;
    col[e.j] += e.mass;
  }
  for (int i = 0; i < source_.size(); ++i)
    if (std::abs(row[i] - source_.atom(i).w) > 1e-10)
      throw InfeasibleWeights("plan row marginals do not match source");
  for (int j = 0; j < target_.size(); ++j)
    if (std::abs(col[j] - target_.atom(j).w) > 1e-10)
      throw InfeasibleWeights("plan column marginals do not match target");
}

double TransportPlan::cost() const {
  double c = 0;
  for (const auto& e : entries_) {
    const double d =
        source_.manifold().distance(source_.atom(e.i).x, target_.atom(e.j).x);
    c += e.mass * d * d;
  }
  return c;
}

bool TransportPlan::deterministic() const {
  std::vector<int> seen(source_.size(), -1);
  for (const auto& e : entries_) {
    if (seen[e.i] >= 0 && seen[e.i] != e.j) return false;
    seen[e.i] = e.j;
  }
  return true;
}

std::vector<int> TransportPlan::map() const {
  std::vector<int> m(source_.size(), -1);
  for (const auto& e : entries_) {
    if (m[e.i] >= 0 && m[e.i] != e.j)
      throw NonOptimalPlan("plan is not deterministic");
    m[e.i] = e.j;
  }
  return m;
}

TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!(mu.manifold() == nu.manifold()))
    throw ManifoldMismatch("solve_ot requires a shared manifold");
  if (mu.size() > 4096 || nu.size() > 4096)
    throw SolverFailure("solve_ot supports at most 4096 atoms");
  double wa = 0, wb = 0;
  for (const auto& a : mu.atoms()) wa += a.w;
  for (const auto& a : nu.atoms()) wb += a.w;
  if (std::abs(wa - wb) > 1e-10)
    throw InfeasibleWeights("weight sums differ");

  const Mat c = cost_matrix(mu, nu);
  std::vector<PlanEntry> entries;
  if (mu.size() == nu.size() && mu.uniform() && nu.uniform()) {
    const auto match = solve_assignment(c);
    const double m = 1.0 / mu.size();
    for (int i = 0; i < mu.size(); ++i) entries.push_back({i, match[i], m});
  } else {
    std::vector<double> a(mu.size()), b(nu.size());
    for (int i = 0; i < mu.size(); ++i) a[i] = mu.atom(i).w;
    for (int j = 0; j < nu.size(); ++j) b[j] = nu.atom(j).w;
    entries = solve_mcf(c, a, b);
  }
  return TransportPlan(mu, nu, std::move(entries));
}

double w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return std::sqrt(solve_ot(mu, nu).cost());
}

DiscreteMeasure interpolate_unchecked(const TransportPlan& plan, double t) {
  if (t < 0 || t > 1)
    throw ParameterOutOfRange("interpolation parameter outside [0,1]");
  const auto& m = plan.source().manifold();
  std::vector<Atom> atoms;
  for (const auto& e : plan.entries()) {
    const Point p = m.geodesic_point(plan.source().atom(e.i).x,
                                     plan.target().atom(e.j).x, t);
    bool merged = false;
    for (auto& a : atoms) {
      if ((a.x - p).norm() < 1e-12) {
        a.w += e.mass;
        merged = true;
        break;
      }
    }
    if (!merged) atoms.push_back({p, e.mass});
  }
  return DiscreteMeasure::unchecked(m, std::move(atoms));
}

DiscreteMeasure interpolate(const TransportPlan& plan, double t) {
  if (!verify_optimality(plan, 64))
    throw NonOptimalPlan("interpolate requires an optimal plan");
  return interpolate_unchecked(plan, t);
}

double plan_distance(const TransportPlan& p1, const TransportPlan& p2) {
  const auto& src = p1.source();
  if (src.size() != p2.source().size() ||
      !(src.manifold() == p2.source().manifold()))
    throw SourceMismatch("plans must share the source measure");
  for (int i = 0; i < src.size(); ++i)
    if (src.manifold().distance(src.atom(i).x, p2.source().atom(i).x) > 1e-9)
      throw SourceMismatch("plans must share the source measure");

  auto conditional = [&](const TransportPlan& p, int i) {
    std::vector<Atom> atoms;
    double total = 0;
    for (const auto& e : p.entries()) {
      if (e.i != i) continue;
      atoms.push_back({p.target().atom(e.j).x, e.mass});
      total += e.mass;
    }
    for (auto& a : atoms) a.w /= total;
    return DiscreteMeasure::unchecked(src.manifold(), std::move(atoms));
  };

  // L2 mixture of the conditional distances: with this normalization the
  // gluing coupling shows the result dominates w2 between the targets.
  double d2 = 0;
  for (int i = 0; i < src.size(); ++i) {
    const double di = w2(conditional(p1, i), conditional(p2, i));
    d2 += src.atom(i).w * di * di;
  }
  return std::sqrt(d2);
}

double assignment_brute_force(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double c = 0;
    for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool verify_optimality(const TransportPlan& plan, int trials,
                       unsigned long seed, double tol) {
  const auto& mu = plan.source();
  const auto& nu = plan.target();
  if (mu.size() <= 7 && nu.size() <= 7 && mu.size() == nu.size() &&
      mu.uniform() && nu.uniform()) {
    const Mat c = cost_matrix(mu, nu) / mu.size();
    return plan.cost() <= assignment_brute_force(c) + tol;
  }
  const auto& es = plan.entries();
  const int ne = static_cast<int>(es.size());
  if (ne < 2) return true;
  const Mat c = cost_matrix(mu, nu);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, ne - 1);
  for (int t = 0; t < trials; ++t) {
    const int len = 2 + static_cast<int>(t % 3);  // cycles of length 2..4
    std::vector<int> idx(len);
    for (int k = 0; k < len; ++k) idx[k] = pick(rng);
    double cur = 0, swapped = 0;
    for (int k = 0; k < len; ++k) {
      cur += c(es[idx[k]].i, es[idx[k]].j);
      swapped += c(es[idx[k]].i, es[idx[(k + 1) % len]].j);
    }
    if (swapped < cur - tol) return false;
  }
  return true;
}

InteriorReport check_interior(const TransportPlan& plan, int samples) {
  const auto map = plan.map();
  const auto& m = plan.source().manifold();
  InteriorReport rep{kInf, 0.0, false};
  for (int s = 1; s <= samples; ++s) {
    const double t = static_cast<double>(s) / (samples + 1);
    std::vector<Point> pts;
    pts.reserve(map.size());
    for (size_t i = 0; i < map.size(); ++i)
      pts.push_back(m.geodesic_point(plan.source().atom(i).x,
                                     plan.target().atom(map[i]).x, t));
    const double d = min_pairwise_distance(m, pts);
    if (d < rep.min_distance) {
      rep.min_distance = d;
      rep.argmin_t = t;
    }
  }
  rep.violation = rep.min_distance < 1e-9;
  return rep;
}

}  // namespace wpt
