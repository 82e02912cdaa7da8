#pragma once

// Post-hoc analyses of trained embeddings: 2-D PCA projection, k-means
// clustering and Euclidean nearest neighbours.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "peloton/model.hpp"

namespace peloton {

struct PcaResult {
  Matrix projections;                     // n x c, column means zero
  Matrix components;                      // c x D, orthonormal rows
  std::vector<double> explained_variance; // c entries, non-increasing
  Eigen::VectorXd mean;                   // D, subtracted before projecting
};

/// Covariance PCA (divisor n - 1). Each component is oriented so that its
/// largest-magnitude coordinate is positive, the lowest index winning ties.
/// Throws UsageError when n < 2 or n_components is not in [1, min(n, D)].
PcaResult pca_project(const Matrix& data, std::size_t n_components = 2);

struct ClusterResult {
  std::vector<int> assignments;  // in [0, k)
  Matrix centroids;              // k x D
  double inertia = 0.0;          // sum of squared distances to assigned centroid
  std::size_t iterations = 0;    // Lloyd updates performed
  /// Inertia after every assignment step, the initial one included.
  std::vector<double> inertia_history;
};

/// k-means++ seeding followed by Lloyd iterations, stopping once the largest
/// squared centroid shift is <= tol or after max_iters updates. An emptied
/// cluster takes over the point farthest from its own centroid.
/// Throws UsageError unless 1 <= k <= n.
ClusterResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                     std::size_t max_iters = 300, double tol = 1e-9);

struct Neighbor {
  std::string key;
  double distance = 0.0;
  bool operator==(const Neighbor&) const = default;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// The `count` entities of the query's type closest to it, query excluded,
/// ordered by distance then key. Throws LookupError for an unknown key.
std::vector<Neighbor> nearest_neighbors(std::string_view query_key, const EmbeddingSet& embeddings,
                                        std::size_t count);

/// Keys of the same entity type as `query_key` that sort next to it.
std::vector<std::string> near_miss_keys(std::string_view query_key,
                                        const EmbeddingSet& embeddings, std::size_t count = 5);

}  // namespace peloton
