#include "peloton/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <tuple>

#include "peloton/csv.hpp"
#include "peloton/errors.hpp"

namespace peloton {

namespace {

constexpr std::array<std::string_view, 9> kColumns = {
    "season", "race_id", "race_name", "race_type", "stage",
    "profile_score", "rider_id", "rider_name", "pcs_points",
};

constexpr std::string_view kRiderPrefix = "rider:";
constexpr std::string_view kOneDayPrefix = "race:oneday:";
constexpr std::string_view kStagePrefix = "race:stage:";

void check_header(std::string_view line) {
  if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
  const auto fields = csv::split_line(csv::chomp(line), 1);
  for (std::string_view column : kColumns) {
    if (std::find(fields.begin(), fields.end(), column) == fields.end()) {
      throw FormatError("missing column " + std::string(column), 1);
    }
  }
  if (fields.size() != kColumns.size() ||
      !std::equal(fields.begin(), fields.end(), kColumns.begin())) {
    throw FormatError(
        "header must be exactly "
        "season,race_id,race_name,race_type,stage,profile_score,rider_id,rider_name,pcs_points",
        1);
  }
}

ResultRow parse_row(const std::vector<std::string>& f, std::size_t line) {
  if (f.size() != kColumns.size()) {
    throw FormatError("expected " + std::to_string(kColumns.size()) + " fields, found " +
                          std::to_string(f.size()),
                      line);
  }
  ResultRow row;
  const long long season = csv::parse_integer(f[0], "season", line);
  if (season < 0 || season > 100000) throw FormatError("season out of range", line);
  row.season = static_cast<int>(season);

  row.race_id = f[1];
  if (row.race_id.empty()) throw FormatError("empty race_id", line);
  if (row.race_id.find(':') != std::string::npos) {
    throw FormatError("race_id may not contain ':'", line);
  }
  row.race_name = f[2];

  const auto type = parse_race_type(f[3]);
  if (!type) throw FormatError("unknown race_type '" + f[3] + "'", line);
  row.race_type = *type;

  if (is_stage_unit(row.race_type)) {
    if (f[4].empty()) throw FormatError("stage label required for race_type " + f[3], line);
    row.stage = f[4];
  } else if (!f[4].empty()) {
    throw FormatError("stage label not allowed for race_type " + f[3], line);
  }

  if (!f[5].empty()) {
    const double profile = csv::parse_double(f[5], "profile_score", line);
    if (profile < 0) throw FormatError("negative profile_score", line);
    row.profile_score = profile;
  }

  row.rider_id = f[6];
  if (row.rider_id.empty()) throw FormatError("empty rider_id", line);
  row.rider_name = f[7];

  row.pcs_points = csv::parse_double(f[8], "pcs_points", line);
  if (row.pcs_points < 0) throw FormatError("negative pcs_points", line);
  return row;
}

// Normalization unit: one-day races are still split per season here.
using EditionKey = std::tuple<std::string, int, std::string>;

EditionKey edition_of(const ResultRow& row) {
  return {row.race_id, row.season, row.stage.value_or("")};
}

}  // namespace

std::string_view to_string(RaceType type) {
  switch (type) {
    case RaceType::kOneDay: return "one_day";
    case RaceType::kStage: return "stage";
    case RaceType::kIndividualTimeTrialStage: return "individual_time_trial_stage";
    case RaceType::kTeamTimeTrial: return "team_time_trial";
    case RaceType::kGeneralClassification: return "general_classification";
  }
  return "";
}

std::optional<RaceType> parse_race_type(std::string_view text) {
  for (RaceType t : {RaceType::kOneDay, RaceType::kStage, RaceType::kIndividualTimeTrialStage,
                     RaceType::kTeamTimeTrial, RaceType::kGeneralClassification}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

bool is_stage_unit(RaceType type) {
  return type == RaceType::kStage || type == RaceType::kIndividualTimeTrialStage ||
         type == RaceType::kTeamTimeTrial;
}

RaceKey race_key_of(const ResultRow& row) {
  if (row.race_type == RaceType::kOneDay) return OneDayRace{row.race_id};
  return StageUnit{row.race_id, row.season, row.stage.value_or("")};
}

std::string entity_key(const RaceKey& key) {
  if (const auto* one_day = std::get_if<OneDayRace>(&key)) {
    return std::string(kOneDayPrefix) + one_day->race_id;
  }
  const auto& stage = std::get<StageUnit>(key);
  return std::string(kStagePrefix) + stage.race_id + ":" + std::to_string(stage.season) + ":" +
         stage.stage;
}

std::string rider_entity_key(std::string_view rider_id) {
  return std::string(kRiderPrefix) + std::string(rider_id);
}

std::optional<RaceKey> parse_race_entity_key(std::string_view text) {
  if (text.starts_with(kOneDayPrefix)) {
    text.remove_prefix(kOneDayPrefix.size());
    if (text.empty() || text.find(':') != std::string_view::npos) return std::nullopt;
    return OneDayRace{std::string(text)};
  }
  if (!text.starts_with(kStagePrefix)) return std::nullopt;
  text.remove_prefix(kStagePrefix.size());
  const auto first = text.find(':');
  if (first == std::string_view::npos || first == 0) return std::nullopt;
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos || second + 1 >= text.size()) return std::nullopt;
  const auto season_text = text.substr(first + 1, second - first - 1);
  long long season = 0;
  try {
    season = csv::parse_integer(season_text, "season", 0);
  } catch (const FormatError&) {
    return std::nullopt;
  }
  // Reject non-canonical spellings such as "02016" so the key round-trips.
  if (std::to_string(season) != season_text || season < 0 || season > 100000) {
    return std::nullopt;
  }
  return StageUnit{std::string(text.substr(0, first)), static_cast<int>(season),
                   std::string(text.substr(second + 1))};
}

std::optional<std::string> parse_rider_entity_key(std::string_view text) {
  if (!text.starts_with(kRiderPrefix) || text.size() == kRiderPrefix.size()) return std::nullopt;
  return std::string(text.substr(kRiderPrefix.size()));
}

EntityIndex::EntityIndex(std::vector<std::string> rider_ids, std::vector<RaceKey> race_keys)
    : rider_ids_(std::move(rider_ids)), race_keys_(std::move(race_keys)) {
  for (std::size_t i = 0; i < rider_ids_.size(); ++i) {
    if (!rider_lookup_.emplace(rider_ids_[i], i).second) {
      throw ContractError("duplicate rider key " + rider_entity_key(rider_ids_[i]));
    }
  }
  for (std::size_t i = 0; i < race_keys_.size(); ++i) {
    if (!race_lookup_.emplace(entity_key(race_keys_[i]), i).second) {
      throw ContractError("duplicate race key " + entity_key(race_keys_[i]));
    }
  }
}

std::optional<std::size_t> EntityIndex::find_rider(std::string_view rider_id) const {
  const auto it = rider_lookup_.find(rider_id);
  if (it == rider_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EntityIndex::find_race(const RaceKey& key) const {
  const auto it = race_lookup_.find(entity_key(key));
  if (it == race_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string EntityIndex::rider_key(std::size_t index) const {
  return rider_entity_key(rider_ids_.at(index));
}

std::string EntityIndex::race_key(std::size_t index) const {
  return entity_key(race_keys_.at(index));
}

std::vector<ResultRow> parse_results(std::istream& source) {
  std::string line;
  if (!std::getline(source, line)) throw FormatError("missing header line", 1);
  check_header(line);

  std::vector<ResultRow> rows;
  std::size_t line_number = 1;
  while (std::getline(source, line)) {
    ++line_number;
    const auto content = csv::chomp(line);
    if (content.empty()) continue;
    rows.push_back(parse_row(csv::split_line(content, line_number), line_number));
  }
  return rows;
}

std::vector<ResultRow> filter_rows(const std::vector<ResultRow>& rows) {
  std::vector<ResultRow> kept;
  kept.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.race_type == RaceType::kTeamTimeTrial ||
        row.race_type == RaceType::kGeneralClassification) {
      continue;
    }
    kept.push_back(row);
  }
  return kept;
}

Normalization normalize_scores(const std::vector<ResultRow>& rows) {
  std::map<EditionKey, double> winner_points;
  for (const auto& row : rows) {
    auto [it, inserted] = winner_points.emplace(edition_of(row), row.pcs_points);
    if (!inserted) it->second = std::max(it->second, row.pcs_points);
  }

  Normalization out;
  for (const auto& [edition, best] : winner_points) {
    if (best <= 0.0) ++out.editions_dropped_zero_winner;
  }
  out.results.reserve(rows.size());
  for (const auto& row : rows) {
    const double best = winner_points.at(edition_of(row));
    if (best <= 0.0) continue;
    out.results.push_back({race_key_of(row), row.season, row.rider_id, row.pcs_points / best});
  }
  return out;
}

EntityIndex build_entity_index(const std::vector<ResultRow>& rows, double min_rider_points) {
  std::map<std::string, double> totals;
  std::map<std::string, RaceKey> races;
  for (const auto& row : rows) {
    totals[row.rider_id] += row.pcs_points;
    const RaceKey key = race_key_of(row);
    races.emplace(entity_key(key), key);
  }

  // std::map iteration order is the lexicographic key order; "rider:" + id
  // sorts the same as id.
  std::vector<std::string> rider_ids;
  for (const auto& [id, total] : totals) {
    if (total >= min_rider_points) rider_ids.push_back(id);
  }
  std::vector<RaceKey> race_keys;
  race_keys.reserve(races.size());
  for (const auto& [text, key] : races) race_keys.push_back(key);
  return EntityIndex(std::move(rider_ids), std::move(race_keys));
}

std::vector<TrainingExample> assemble_training_set(const std::vector<NormalizedResult>& normalized,
                                                   const EntityIndex& index) {
  std::vector<TrainingExample> examples;
  examples.reserve(normalized.size());
  for (const auto& result : normalized) {
    const auto rider = index.find_rider(result.rider_id);
    if (!rider) continue;
    const auto race = index.find_race(result.race);
    if (!race) throw ContractError("race " + entity_key(result.race) + " missing from index");
    examples.push_back({*rider, *race, result.y});
  }
  return examples;
}

std::map<std::string, std::optional<double>> race_profile_scores(const std::vector<ResultRow>& rows) {
  struct Latest {
    int season = 0;
    std::optional<double> value;
  };
  std::map<std::string, Latest> latest;
  for (const auto& row : rows) {
    auto [it, inserted] = latest.try_emplace(entity_key(race_key_of(row)));
    auto& slot = it->second;
    if (!row.profile_score) continue;
    if (!slot.value || row.season > slot.season) {
      slot.season = row.season;
      slot.value = row.profile_score;
    }
  }
  std::map<std::string, std::optional<double>> out;
  for (const auto& [key, slot] : latest) out.emplace(key, slot.value);
  return out;
}

std::string format_summary(const IngestionSummary& s) {
  std::ostringstream out;
  out << "rows_read=" << s.rows_read << '\n'
      << "rows_filtered=" << s.rows_filtered << '\n'
      << "editions_dropped_zero_winner=" << s.editions_dropped_zero_winner << '\n'
      << "riders_indexed=" << s.riders_indexed << '\n'
      << "races_indexed=" << s.races_indexed << '\n'
      << "examples=" << s.examples << '\n';
  return out.str();
}

Dataset ingest(std::istream& source, double min_rider_points) {
  const auto rows = parse_results(source);
  const auto kept = filter_rows(rows);
  auto normalized = normalize_scores(kept);

  Dataset data;
  data.index = build_entity_index(kept, min_rider_points);
  data.examples = assemble_training_set(normalized.results, data.index);
  data.profile_scores = race_profile_scores(kept);
  data.summary.rows_read = rows.size();
  data.summary.rows_filtered = rows.size() - kept.size();
  data.summary.editions_dropped_zero_winner = normalized.editions_dropped_zero_winner;
  data.summary.riders_indexed = data.index.rider_count();
  data.summary.races_indexed = data.index.race_count();
  data.summary.examples = data.examples.size();
  return data;
}

}  // namespace peloton
