#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stylos/error.hpp"
#include "stylos/optim.hpp"
#include "stylos/sampling.hpp"

namespace stylos::optim {

namespace {

using Points = std::vector<DenseVector>;

// k-means++ with greedy candidate selection: each new center is the best of
// 2 + ln(k) D^2-weighted draws.
Points seed_centers(const Points& X, int k, std::mt19937_64& rng) {
  const std::size_t n = X.size();
  Points centers;
  std::uniform_int_distribution<std::size_t> uniform(0, n - 1);
  centers.push_back(X[uniform(rng)]);
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = squared_distance(X[i], centers[0]);

  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    const double total = std::accumulate(closest.begin(), closest.end(), 0.0);
    std::size_t best_candidate = 0;
    double best_potential = std::numeric_limits<double>::infinity();
    std::vector<double> best_closest;
    for (int t = 0; t < trials; ++t) {
      std::size_t cand = uniform(rng);
      if (total > 0.0) {
        double target = unit(rng) * total;
        cand = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          target -= closest[i];
          if (target < 0.0) {
            cand = i;
            break;
          }
        }
      }
      std::vector<double> next(n);
      double potential = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = std::min(closest[i], squared_distance(X[i], X[cand]));
        potential += next[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        best_candidate = cand;
        best_closest = std::move(next);
      }
    }
    centers.push_back(X[best_candidate]);
    closest = std::move(best_closest);
  }
  return centers;
}

std::pair<int, double> closest_center(const Points& centers, const DenseVector& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = squared_distance(x, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return {best, best_d};
}

Clustering lloyd(const Points& X, Points centers, int max_iter) {
  const std::size_t n = X.size(), dim = X[0].size();
  const int k = static_cast<int>(centers.size());
  Clustering c;
  c.k = k;
  c.assignments.assign(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [best, d] = closest_center(centers, X[i]);
      inertia += d;
      if (best != c.assignments[i]) {
        c.assignments[i] = best;
        changed = true;
      }
    }
    c.inertia_trace.push_back(inertia);
    c.iterations = it + 1;
    if (!changed) break;

    Points sums(static_cast<std::size_t>(k), DenseVector(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[static_cast<std::size_t>(c.assignments[i])];
      for (std::size_t j = 0; j < dim; ++j) s[j] += X[i][j];
      ++counts[static_cast<std::size_t>(c.assignments[i])];
    }
    for (std::size_t cl = 0; cl < sums.size(); ++cl) {
      if (counts[cl] == 0) continue;  // empty cluster keeps its previous center
      for (std::size_t j = 0; j < dim; ++j) {
        centers[cl][j] = sums[cl][j] / static_cast<double>(counts[cl]);
      }
    }
  }
  c.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto [best, d] = closest_center(centers, X[i]);
    c.assignments[i] = best;
    c.inertia += d;
  }
  c.centroids = std::move(centers);
  return c;
}

}  // namespace

Clustering kmeans(const std::vector<DenseVector>& X, int k, std::uint64_t seed,
                  const KMeansOptions& opts) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (X.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(X.size()) + " points for k = " +
                                             std::to_string(k));
  }
  const std::size_t dim = X[0].size();
  for (const auto& x : X) {
    if (x.size() != dim) throw Error(ErrorCode::DimensionMismatch, "k-means points differ in size");
  }
  Clustering best;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(r));
    auto c = lloyd(X, seed_centers(X, k, rng), opts.max_iter);
    if (r == 0 || c.inertia < best.inertia) best = std::move(c);
  }
  best.seed = seed;
  return best;
}

int nearest_centroid(const Clustering& c, const DenseVector& x) {
  return closest_center(c.centroids, x).first;
}

ElbowResult elbow_select(const std::vector<DenseVector>& X, int k_min, int k_max,
                         std::uint64_t seed, const KMeansOptions& opts) {
  if (k_min < 1 || k_max < k_min + 2) {
    throw Error(ErrorCode::InvalidArgument, "elbow range needs at least one interior k");
  }
  if (X.size() <= static_cast<std::size_t>(k_max)) {
    throw Error(ErrorCode::TooFewPoints, "elbow needs more than k_max points");
  }
  ElbowResult r;
  for (int k = k_min; k <= k_max; ++k) {
    r.ks.push_back(k);
    r.inertias.push_back(kmeans(X, k, seed, opts).inertia);
  }
  // Both axes scaled so the chord runs from (0, 1) to (1, 0).
  const double first = r.inertias.front(), last = r.inertias.back();
  const double span = first - last;
  r.distances.assign(r.ks.size(), 0.0);
  for (std::size_t i = 1; i + 1 < r.ks.size(); ++i) {
    const double x = static_cast<double>(r.ks[i] - k_min) / static_cast<double>(k_max - k_min);
    const double y = span != 0.0 ? (r.inertias[i] - last) / span : 1.0 - x;
    r.distances[i] = std::abs(x + y - 1.0) / std::sqrt(2.0);
  }
  std::size_t best = 1;
  for (std::size_t i = 2; i + 1 < r.ks.size(); ++i) {
    if (r.distances[i] > r.distances[best] + 1e-9) best = i;
  }
  r.k = r.ks[best];
  return r;
}

}  // namespace stylos::optim
