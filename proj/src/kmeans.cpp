#include <limits>

#include "peloton/analysis.hpp"
#include "peloton/errors.hpp"
#include "peloton/random.hpp"

namespace peloton {

namespace {

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

Matrix seed_plus_plus(const Matrix& data, std::size_t k, SeededRandom& rng) {
  const Eigen::Index n = data.rows();
  Matrix centroids(static_cast<Eigen::Index>(k), data.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = data.row(first);
  chosen[static_cast<std::size_t>(first)] = true;

  std::vector<double> nearest(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    nearest[static_cast<std::size_t>(i)] = squared_distance(data, i, centroids, 0);
  }

  for (Eigen::Index c = 1; c < static_cast<Eigen::Index>(k); ++c) {
    double total = 0.0;
    for (double w : nearest) total += w;

    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest[static_cast<std::size_t>(i)];
        if (nearest[static_cast<std::size_t>(i)] > 0.0 && target < acc) {
          pick = i;
          break;
        }
      }
      // Rounding can leave target == acc at the end; take the last positive weight.
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (nearest[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point coincides with a centre already; choose among unused rows.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      }
      pick = unused[rng.below(unused.size())];
    }

    chosen[static_cast<std::size_t>(pick)] = true;
    centroids.row(c) = data.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& w = nearest[static_cast<std::size_t>(i)];
      w = std::min(w, squared_distance(data, i, centroids, c));
    }
  }
  return centroids;
}

// Nearest centroid for every row (lowest index on ties); returns the inertia.
double assign(const Matrix& data, const Matrix& centroids, std::vector<int>& labels,
              std::vector<double>& distances) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(data, i, centroids, c);
      if (d < best) {
        best = d;
        label = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = label;
    distances[static_cast<std::size_t>(i)] = best;
    inertia += best;
  }
  return inertia;
}

}  // namespace

ClusterResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iters,
                     double tol) {
  const auto n = static_cast<std::size_t>(data.rows());
  if (k == 0) throw UsageError("k must be at least 1");
  if (k > n) {
    throw UsageError("k = " + std::to_string(k) + " exceeds the number of points (" +
                     std::to_string(n) + ")");
  }

  SeededRandom rng(seed);
  ClusterResult out;
  out.centroids = seed_plus_plus(data, k, rng);
  out.assignments.assign(n, 0);
  std::vector<double> distances(n, 0.0);
  out.inertia = assign(data, out.centroids, out.assignments, distances);
  out.inertia_history.push_back(out.inertia);

  const auto kk = static_cast<Eigen::Index>(k);
  while (out.iterations < max_iters) {
    Matrix sums = Matrix::Zero(kk, data.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto label = static_cast<std::size_t>(out.assignments[i]);
      sums.row(static_cast<Eigen::Index>(label)) += data.row(static_cast<Eigen::Index>(i));
      ++sizes[label];
    }

    Matrix updated = out.centroids;
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        updated.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(sizes[c]);
      }
    }
    // Distances relative to the updated centroids decide which point moves
    // into an empty cluster.
    for (std::size_t i = 0; i < n; ++i) {
      distances[i] = squared_distance(data, static_cast<Eigen::Index>(i), updated,
                                      static_cast<Eigen::Index>(out.assignments[i]));
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(out.assignments[i])] < 2) continue;
        if (far == n || distances[i] > distances[far]) far = i;
      }
      if (far == n) break;  // cannot happen while k <= n
      --sizes[static_cast<std::size_t>(out.assignments[far])];
      out.assignments[far] = static_cast<int>(c);
      sizes[c] = 1;
      distances[far] = 0.0;
      updated.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(far));
    }

    double shift = 0.0;
    for (Eigen::Index c = 0; c < kk; ++c) {
      shift = std::max(shift, squared_distance(updated, c, out.centroids, c));
    }
    out.centroids = std::move(updated);
    ++out.iterations;

    out.inertia = assign(data, out.centroids, out.assignments, distances);
    out.inertia_history.push_back(out.inertia);
    if (shift <= tol) break;
  }
  return out;
}

}  // namespace peloton
