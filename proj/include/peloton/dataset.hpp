#pragma once

// Ingestion of historical race results: parsing, category filtering, per-edition
// score normalization and rider/race entity indexing.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace peloton {

enum class RaceType {
  kOneDay,
  kStage,
  kIndividualTimeTrialStage,
  kTeamTimeTrial,
  kGeneralClassification,
};

std::string_view to_string(RaceType type);
std::optional<RaceType> parse_race_type(std::string_view text);

/// True for the units of a stage race (a `stage` label is mandatory for these).
bool is_stage_unit(RaceType type);

struct ResultRow {
  int season = 0;
  std::string race_id;
  std::string race_name;
  RaceType race_type = RaceType::kOneDay;
  std::optional<std::string> stage;
  std::optional<double> profile_score;
  std::string rider_id;
  std::string rider_name;
  double pcs_points = 0.0;
};

/// One-day races share one embedding across seasons.
struct OneDayRace {
  std::string race_id;
  auto operator<=>(const OneDayRace&) const = default;
};

/// A single stage of a single stage-race edition.
struct StageUnit {
  std::string race_id;
  int season = 0;
  std::string stage;
  auto operator<=>(const StageUnit&) const = default;
};

using RaceKey = std::variant<OneDayRace, StageUnit>;

RaceKey race_key_of(const ResultRow& row);

/// `race:oneday:<race_id>` or `race:stage:<race_id>:<season>:<stage>`.
std::string entity_key(const RaceKey& key);
std::string rider_entity_key(std::string_view rider_id);

/// Inverse of entity_key for race keys; nullopt when `text` is not a race key.
std::optional<RaceKey> parse_race_entity_key(std::string_view text);
/// Returns the rider id of a `rider:<id>` key, nullopt otherwise.
std::optional<std::string> parse_rider_entity_key(std::string_view text);

/// Dense bidirectional mapping between entity keys and matrix rows.
class EntityIndex {
 public:
  EntityIndex() = default;
  /// Keeps the given order; throws ContractError on duplicate keys.
  EntityIndex(std::vector<std::string> rider_ids, std::vector<RaceKey> race_keys);

  std::size_t rider_count() const noexcept { return rider_ids_.size(); }
  std::size_t race_count() const noexcept { return race_keys_.size(); }

  const std::vector<std::string>& rider_ids() const noexcept { return rider_ids_; }
  const std::vector<RaceKey>& race_keys() const noexcept { return race_keys_; }

  std::optional<std::size_t> find_rider(std::string_view rider_id) const;
  std::optional<std::size_t> find_race(const RaceKey& key) const;

  std::string rider_key(std::size_t index) const;
  std::string race_key(std::size_t index) const;

  bool operator==(const EntityIndex& other) const {
    return rider_ids_ == other.rider_ids_ && race_keys_ == other.race_keys_;
  }

 private:
  std::vector<std::string> rider_ids_;
  std::vector<RaceKey> race_keys_;
  std::map<std::string, std::size_t, std::less<>> rider_lookup_;
  std::map<std::string, std::size_t, std::less<>> race_lookup_;
};

struct TrainingExample {
  std::size_t rider_index = 0;
  std::size_t race_index = 0;
  double y = 0.0;
  bool operator==(const TrainingExample&) const = default;
};

/// A result after dividing by the edition winner's points.
struct NormalizedResult {
  RaceKey race;
  int season = 0;
  std::string rider_id;
  double y = 0.0;
};

struct Normalization {
  std::vector<NormalizedResult> results;
  std::size_t editions_dropped_zero_winner = 0;
};

inline constexpr double kDefaultMinRiderPoints = 25.0;

/// Parses the results table. The header must be exactly
/// `season,race_id,race_name,race_type,stage,profile_score,rider_id,rider_name,pcs_points`.
/// Throws FormatError with the offending line number.
std::vector<ResultRow> parse_results(std::istream& source);

/// Drops team time trials and general classifications.
std::vector<ResultRow> filter_rows(const std::vector<ResultRow>& rows);

/// y = points / winner points within each edition. One-day editions are
/// grouped per season even though their embedding key is shared. Editions
/// whose winner scored 0 are dropped and counted. Output preserves row order.
Normalization normalize_scores(const std::vector<ResultRow>& rows);

/// Riders with summed raw points >= min_rider_points, and every race key seen
/// in `rows`. Both sorted by entity key.
EntityIndex build_entity_index(const std::vector<ResultRow>& rows, double min_rider_points);

/// One example per normalized result whose rider is indexed.
std::vector<TrainingExample> assemble_training_set(const std::vector<NormalizedResult>& normalized,
                                                   const EntityIndex& index);

/// Profile score per race entity key. Shared one-day keys take the value of
/// the most recent season that reports one.
std::map<std::string, std::optional<double>> race_profile_scores(const std::vector<ResultRow>& rows);

struct IngestionSummary {
  std::size_t rows_read = 0;
  std::size_t rows_filtered = 0;  // rows removed as team time trial / GC
  std::size_t editions_dropped_zero_winner = 0;
  std::size_t riders_indexed = 0;
  std::size_t races_indexed = 0;
  std::size_t examples = 0;
};

/// key=value lines in a fixed order.
std::string format_summary(const IngestionSummary& summary);

struct Dataset {
  EntityIndex index;
  std::vector<TrainingExample> examples;
  IngestionSummary summary;
  std::map<std::string, std::optional<double>> profile_scores;
};

/// parse -> filter -> normalize -> index -> assemble.
Dataset ingest(std::istream& source, double min_rider_points = kDefaultMinRiderPoints);

}  // namespace peloton
