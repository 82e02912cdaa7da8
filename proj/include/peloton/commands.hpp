#pragma once

// Subcommands behind the `peloton` executable. Each returns a process exit
// status; library errors propagate as exceptions and are mapped to exit
// codes by run_cli.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "peloton/dataset.hpp"
#include "peloton/trainer.hpp"

namespace peloton {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Everything needed to reproduce a training run.
struct RunManifest {
  TrainConfig config;
  double min_rider_points = kDefaultMinRiderPoints;
  std::string input_name;    // file name of the results table
  std::string input_digest;  // "sha256:<hex>"
  IngestionSummary summary;
  std::string tool_version = kToolVersion;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

/// Hex SHA-256 of the file contents, prefixed with "sha256:".
std::string file_digest(const std::filesystem::path& path);

struct TrainOptions {
  TrainConfig config;
  double min_rider_points = kDefaultMinRiderPoints;
};

/// Writes embeddings.csv, loss_history.csv and manifest.json into output_dir.
int cmd_train(const std::filesystem::path& results, const std::filesystem::path& output_dir,
              const TrainOptions& options, std::ostream& out, std::ostream& err);

/// Same, taking configuration from an earlier manifest; refuses to run when
/// the results file digest differs from the recorded one.
int cmd_train_from_manifest(const std::filesystem::path& results,
                            const std::filesystem::path& output_dir,
                            const std::filesystem::path& manifest, std::ostream& out,
                            std::ostream& err);

struct AnalyzeOptions {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> profile_scores;  // a results table
  std::optional<std::filesystem::path> output_dir;      // default: next to embeddings
};

/// Writes rider_pca.csv, race_pca.csv and clusters.csv.
int cmd_analyze(const std::filesystem::path& embeddings, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err);

/// Prints `rank,entity_key,distance` rows.
int cmd_similar(const std::filesystem::path& embeddings, const std::string& query_key,
                std::size_t count, std::ostream& out, std::ostream& err);

/// Prints sigmoid(rider . race).
int cmd_predict(const std::filesystem::path& embeddings, const std::string& rider_key,
                const std::string& race_key, std::ostream& out, std::ostream& err);

/// Runs ingestion only and prints the summary.
int cmd_ingest_check(const std::filesystem::path& results, double min_rider_points,
                     std::ostream& out, std::ostream& err);

/// Decimal rendering of a probability that stays strictly inside (0, 1).
std::string format_probability(double p);

/// Full command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peloton
