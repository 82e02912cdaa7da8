#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "peloton/dataset.hpp"

namespace peloton {

/// Row-major so that each embedding is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Rider matrix (one row per indexed rider) and race matrix (one row per
/// indexed race), sharing one embedding dimension.
struct EmbeddingSet {
  Matrix riders;
  Matrix races;
  EntityIndex index;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(riders.cols()); }

  /// Throws ContractError when shapes disagree with the index or entries are
  /// not finite.
  void validate() const;
};

/// Probability clamp applied before taking logs in `loss`.
inline constexpr double kProbabilityFloor = 1e-12;

/// Plain logistic function, evaluated without overflow for any finite x.
double sigmoid(double x) noexcept;

/// sigmoid(rider . race), clamped into the open interval (0, 1).
double predict(std::span<const double> rider, std::span<const double> race);

/// Mean binary cross-entropy between sigmoid(R_r . S_s) and y.
double loss(const EmbeddingSet& embeddings, std::span<const TrainingExample> examples);

struct Gradients {
  Matrix riders;
  Matrix races;
};

/// d loss / d R and d loss / d S. Uses the unclamped probability.
Gradients loss_gradients(const EmbeddingSet& embeddings, std::span<const TrainingExample> examples);

/// Both of the above from one pass over the examples.
double loss_and_gradients(const EmbeddingSet& embeddings, std::span<const TrainingExample> examples,
                          Gradients& out);

}  // namespace peloton
