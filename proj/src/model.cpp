#include "peloton/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "peloton/errors.hpp"

namespace peloton {

namespace {

void check_example(const EmbeddingSet& e, const TrainingExample& ex) {
  if (ex.rider_index >= static_cast<std::size_t>(e.riders.rows())) {
    throw ContractError("rider index " + std::to_string(ex.rider_index) + " out of range");
  }
  if (ex.race_index >= static_cast<std::size_t>(e.races.rows())) {
    throw ContractError("race index " + std::to_string(ex.race_index) + " out of range");
  }
}

void check_shapes(const EmbeddingSet& e) {
  if (e.riders.cols() != e.races.cols()) {
    throw ContractError("rider and race embeddings differ in dimension");
  }
}

double logit(const EmbeddingSet& e, const TrainingExample& ex) {
  return e.riders.row(static_cast<Eigen::Index>(ex.rider_index))
      .dot(e.races.row(static_cast<Eigen::Index>(ex.race_index)));
}

double bce_term(double p, double y) {
  const double clamped = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return y * std::log(clamped) + (1.0 - y) * std::log1p(-clamped);
}

}  // namespace

void EmbeddingSet::validate() const {
  check_shapes(*this);
  if (static_cast<std::size_t>(riders.rows()) != index.rider_count() ||
      static_cast<std::size_t>(races.rows()) != index.race_count()) {
    throw ContractError("embedding row counts do not match the entity index");
  }
  if (!riders.allFinite() || !races.allFinite()) {
    throw ContractError("embeddings contain non-finite entries");
  }
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double predict(std::span<const double> rider, std::span<const double> race) {
  if (rider.size() != race.size()) {
    throw ContractError("embedding dimensions differ: " + std::to_string(rider.size()) + " vs " +
                        std::to_string(race.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < rider.size(); ++i) dot += rider[i] * race[i];
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(sigmoid(dot), lo, hi);
}

double loss(const EmbeddingSet& embeddings, std::span<const TrainingExample> examples) {
  check_shapes(embeddings);
  if (examples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& ex : examples) {
    check_example(embeddings, ex);
    sum += bce_term(sigmoid(logit(embeddings, ex)), ex.y);
  }
  return -sum / static_cast<double>(examples.size());
}

double loss_and_gradients(const EmbeddingSet& embeddings, std::span<const TrainingExample> examples,
                          Gradients& out) {
  check_shapes(embeddings);
  out.riders.setZero(embeddings.riders.rows(), embeddings.riders.cols());
  out.races.setZero(embeddings.races.rows(), embeddings.races.cols());
  if (examples.empty()) return 0.0;

  const double scale = 1.0 / static_cast<double>(examples.size());
  double sum = 0.0;
  for (const auto& ex : examples) {
    check_example(embeddings, ex);
    const auto r = static_cast<Eigen::Index>(ex.rider_index);
    const auto s = static_cast<Eigen::Index>(ex.race_index);
    const double p = sigmoid(embeddings.riders.row(r).dot(embeddings.races.row(s)));
    sum += bce_term(p, ex.y);
    const double residual = (p - ex.y) * scale;
    out.riders.row(r) += residual * embeddings.races.row(s);
    out.races.row(s) += residual * embeddings.riders.row(r);
  }
  return -sum / static_cast<double>(examples.size());
}

Gradients loss_gradients(const EmbeddingSet& embeddings, std::span<const TrainingExample> examples) {
  Gradients g;
  loss_and_gradients(embeddings, examples, g);
  return g;
}

}  // namespace peloton
