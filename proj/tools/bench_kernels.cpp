// Compares the serial reference kernels against the OpenMP variants on
// growing problem sizes and checks bit-identical results while at it.

#include <chrono>
#include <cstdio>
#include <random>

#include "wpt/kernels.hpp"

using namespace wpt;

namespace {

DiscreteMeasure random_measure(const Manifold& m, int n, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) {
    Vec x(3);
    x << u(rng), u(rng), u(rng);
    atoms.push_back({x, 1.0 / n});
  }
  return DiscreteMeasure(m, std::move(atoms));
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    best = std::min(best, dt);
  }
  return best;
}

}  // namespace

int main() {
  const Manifold m = Manifold::euclidean(3);
  std::printf("%-8s %-14s %12s %12s %8s %s\n", "n", "kernel", "serial_s",
              "parallel_s", "speedup", "identical");
  for (int n : {256, 1024, 4096}) {
    const DiscreteMeasure mu = random_measure(m, n, 7);
    const DiscreteMeasure nu = random_measure(m, n, 8);

    Mat a, b;
    const double ts = time_best_of(3, [&] { a = cost_matrix_serial(mu, nu); });
    const double tp = time_best_of(3, [&] { b = cost_matrix(mu, nu); });
    std::printf("%-8d %-14s %12.6f %12.6f %8.2f %s\n", n, "cost_matrix", ts,
                tp, ts / tp, (a.array() == b.array()).all() ? "yes" : "NO");

    std::vector<Point> pts;
    for (const auto& at : mu.atoms()) pts.push_back(at.x);
    double ds = 0, dp = 0;
    const double ms =
        time_best_of(3, [&] { ds = min_pairwise_distance_serial(m, pts); });
    const double mp =
        time_best_of(3, [&] { dp = min_pairwise_distance(m, pts); });
    std::printf("%-8d %-14s %12.6f %12.6f %8.2f %s\n", n, "min_pairwise", ms,
                mp, ms / mp, ds == dp ? "yes" : "NO");
  }
  return 0;
}
