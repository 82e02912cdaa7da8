#pragma once

// Synthetic inputs shared by the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "peloton/dataset.hpp"
#include "peloton/model.hpp"

namespace peloton::testing {

/// Renders rows in the input results format, header included.
std::string results_csv(const std::vector<ResultRow>& rows);

ResultRow make_row(int season, std::string race_id, RaceType type, std::string stage,
                   std::string rider_id, double points);

/// Riders at 24.9 / 25.0 / 25.1 total points, a one-day race held in two
/// seasons and stage "3" of a stage race held in two seasons.
std::vector<ResultRow> boundary_fixture();

/// Rows shaped like the reference dataset: 958 qualifying riders, 22 one-day
/// races over 118 editions and 951 stage editions, plus excluded categories,
/// riders under the threshold and one edition whose winner scored nothing.
struct ReferenceScaleFixture {
  std::vector<ResultRow> rows;
  std::size_t qualifying_riders = 0;
  std::size_t weak_riders = 0;
  std::size_t one_day_races = 0;
  std::size_t one_day_editions = 0;
  std::size_t stage_editions = 0;
  std::size_t excluded_rows = 0;
  std::size_t zero_winner_editions = 0;
};
ReferenceScaleFixture reference_scale_fixture();

/// A small results table with `n_riders` qualifying riders and roughly
/// `n_examples` finishes.
std::vector<ResultRow> small_results(std::size_t n_riders, std::size_t n_examples,
                                     std::uint64_t seed);

/// Ground-truth embeddings with normal(0, 1) entries and every rider-race
/// pair as an example with y = sigmoid(r . s).
struct PlantedInstance {
  EmbeddingSet truth;
  std::vector<TrainingExample> examples;
};
PlantedInstance planted_instance(std::size_t riders, std::size_t races, std::size_t dim,
                                 std::uint64_t seed);

/// Blob b is centred at separation * e_b, so blobs <= dim. Row i belongs to
/// blob labels[i].
struct Blobs {
  Matrix points;
  std::vector<int> labels;
};
Blobs planted_blobs(std::size_t blobs, std::size_t per_blob, std::size_t dim, double separation,
                    double spread, std::uint64_t seed);

/// Embedding set with the given rider/race matrices and generated keys
/// `rider:r<i>` and `race:oneday:s<i>`.
EmbeddingSet make_embeddings(Matrix riders, Matrix races);

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0);

/// Fresh empty directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace peloton::testing
