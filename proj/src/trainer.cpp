#include "peloton/trainer.hpp"

#include <cmath>

#include "peloton/errors.hpp"
#include "peloton/random.hpp"

namespace peloton {

void TrainConfig::validate() const {
  if (dim < 1) throw UsageError("embedding dimension must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw UsageError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw UsageError("beta2 must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw UsageError("adam epsilon must be positive");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    throw UsageError("init scale must be non-negative");
  }
}

AdamState make_adam_state(const EmbeddingSet& embeddings) {
  AdamState state;
  state.riders.m = Matrix::Zero(embeddings.riders.rows(), embeddings.riders.cols());
  state.riders.v = state.riders.m;
  state.races.m = Matrix::Zero(embeddings.races.rows(), embeddings.races.cols());
  state.races.v = state.races.m;
  return state;
}

EmbeddingSet init_embeddings(const EntityIndex& index, const TrainConfig& config) {
  config.validate();
  const auto dim = static_cast<Eigen::Index>(config.dim);
  EmbeddingSet out{Matrix::Zero(static_cast<Eigen::Index>(index.rider_count()), dim),
                   Matrix::Zero(static_cast<Eigen::Index>(index.race_count()), dim), index};
  if (config.init_scale == 0.0) return out;

  SeededRandom rng(config.seed);
  for (Matrix* m : {&out.riders, &out.races}) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) (*m)(i, j) = config.init_scale * rng.normal();
    }
  }
  return out;
}

void adam_step(Matrix& params, const Matrix& grads, AdamMoments& moments, std::uint64_t step,
               const TrainConfig& config) {
  if (grads.rows() != params.rows() || grads.cols() != params.cols() ||
      moments.m.rows() != params.rows() || moments.m.cols() != params.cols() ||
      moments.v.rows() != params.rows() || moments.v.cols() != params.cols()) {
    throw ContractError("adam_step: parameter, gradient and moment shapes differ");
  }
  if (step == 0) throw ContractError("adam_step: step counter must be incremented first");

  const double t = static_cast<double>(step);
  const double m_correction = 1.0 - std::pow(config.beta1, t);
  const double v_correction = 1.0 - std::pow(config.beta2, t);
  for (Eigen::Index i = 0; i < params.rows(); ++i) {
    for (Eigen::Index j = 0; j < params.cols(); ++j) {
      const double g = grads(i, j);
      double& m = moments.m(i, j);
      double& v = moments.v(i, j);
      m = config.beta1 * m + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g * g;
      const double m_hat = m / m_correction;
      const double v_hat = v / v_correction;
      params(i, j) -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

TrainResult train_from(EmbeddingSet embeddings, std::span<const TrainingExample> examples,
                       const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw UsageError("no training examples");
  embeddings.validate();

  TrainResult result{std::move(embeddings), {}};
  result.loss_history.reserve(config.epochs + 1);
  AdamState state = make_adam_state(result.embeddings);
  Gradients grads;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    result.loss_history.push_back(loss_and_gradients(result.embeddings, examples, grads));
    ++state.step;
    adam_step(result.embeddings.riders, grads.riders, state.riders, state.step, config);
    adam_step(result.embeddings.races, grads.races, state.races, state.step, config);
  }
  result.loss_history.push_back(loss(result.embeddings, examples));
  return result;
}

TrainResult train(std::span<const TrainingExample> examples, const EntityIndex& index,
                  const TrainConfig& config) {
  if (examples.empty()) throw UsageError("no training examples");
  return train_from(init_embeddings(index, config), examples, config);
}

}  // namespace peloton
