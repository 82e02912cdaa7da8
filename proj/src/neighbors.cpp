#include <algorithm>
#include <cmath>

#include "peloton/analysis.hpp"
#include "peloton/errors.hpp"

namespace peloton {

namespace {

struct Rows {
  const Matrix* matrix = nullptr;
  std::vector<std::string> keys;
};

Rows rows_of_type(std::string_view key, const EmbeddingSet& e) {
  Rows rows;
  if (key.starts_with("rider:")) {
    rows.matrix = &e.riders;
    for (std::size_t i = 0; i < e.index.rider_count(); ++i) rows.keys.push_back(e.index.rider_key(i));
  } else if (key.starts_with("race:")) {
    rows.matrix = &e.races;
    for (std::size_t i = 0; i < e.index.race_count(); ++i) rows.keys.push_back(e.index.race_key(i));
  }
  return rows;
}

std::span<const double> row_span(const Matrix& m, std::size_t i) {
  return {m.data() + static_cast<std::ptrdiff_t>(i) * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("euclidean_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::vector<Neighbor> nearest_neighbors(std::string_view query_key, const EmbeddingSet& embeddings,
                                        std::size_t count) {
  const Rows rows = rows_of_type(query_key, embeddings);
  const auto self = std::find(rows.keys.begin(), rows.keys.end(), query_key);
  if (self == rows.keys.end()) throw LookupError(std::string(query_key));
  const auto query = static_cast<std::size_t>(self - rows.keys.begin());

  std::vector<Neighbor> all;
  all.reserve(rows.keys.size());
  const auto q = row_span(*rows.matrix, query);
  for (std::size_t i = 0; i < rows.keys.size(); ++i) {
    if (i == query) continue;
    all.push_back({rows.keys[i], euclidean_distance(q, row_span(*rows.matrix, i))});
  }
  const auto by_distance = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.key < b.key;
  };
  const std::size_t keep = std::min(count, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    by_distance);
  all.resize(keep);
  return all;
}

std::vector<std::string> near_miss_keys(std::string_view query_key,
                                        const EmbeddingSet& embeddings, std::size_t count) {
  Rows rows = rows_of_type(query_key, embeddings);
  if (!rows.matrix) {
    rows = rows_of_type("rider:", embeddings);
    auto races = rows_of_type("race:", embeddings).keys;
    rows.keys.insert(rows.keys.end(), races.begin(), races.end());
  }
  auto& keys = rows.keys;
  std::sort(keys.begin(), keys.end());
  if (keys.size() <= count) return keys;

  // A window of `count` keys centred on the query's insertion point.
  const auto pos = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), query_key) -
                                            keys.begin());
  std::size_t start = pos >= count / 2 ? pos - count / 2 : 0;
  start = std::min(start, keys.size() - count);
  return {keys.begin() + static_cast<std::ptrdiff_t>(start),
          keys.begin() + static_cast<std::ptrdiff_t>(start + count)};
}

}  // namespace peloton
