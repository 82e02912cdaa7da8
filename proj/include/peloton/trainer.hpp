#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "peloton/model.hpp"

namespace peloton {

/// Defaults reproduce the reference setup: D = 5, Adam at lr 0.001, 100 epochs.
struct TrainConfig {
  std::size_t dim = 5;
  double learning_rate = 0.001;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double init_scale = 0.1;

  /// Throws UsageError on out-of-range hyperparameters.
  void validate() const;
};

/// First and second moment accumulators for one parameter matrix.
struct AdamMoments {
  Matrix m;
  Matrix v;
};

struct AdamState {
  AdamMoments riders;
  AdamMoments races;
  std::uint64_t step = 0;  // shared by both matrices
};

/// Zeroed moments shaped like `embeddings`.
AdamState make_adam_state(const EmbeddingSet& embeddings);

/// i.i.d. normal(0, init_scale) entries from a generator seeded with
/// config.seed. Riders are drawn first, row by row, then races.
EmbeddingSet init_embeddings(const EntityIndex& index, const TrainConfig& config);

/// One bias-corrected Adam update. `step` is the 1-based optimizer step
/// count after incrementing.
void adam_step(Matrix& params, const Matrix& grads, AdamMoments& moments, std::uint64_t step,
               const TrainConfig& config);

struct TrainResult {
  EmbeddingSet embeddings;
  /// Loss before every step followed by the loss after the last one
  /// (epochs + 1 entries).
  std::vector<double> loss_history;
};

/// Full-batch training: one gradient over all examples and one Adam step on
/// R and S per epoch. Throws UsageError on an empty example list.
TrainResult train(std::span<const TrainingExample> examples, const EntityIndex& index,
                  const TrainConfig& config);

/// Continues from given embeddings (used by `train` after initialization).
TrainResult train_from(EmbeddingSet embeddings, std::span<const TrainingExample> examples,
                       const TrainConfig& config);

}  // namespace peloton
